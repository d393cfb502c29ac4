"""Chat-completion gateway with record, replay, and scripted modes.

Every prompt is keyed by a content hash over (model, text, temperature).
Live calls append their exchanges to a JSONL store; replay answers from
such a store without touching the network; scripted sessions answer from
a fixture keyed by the same hashes so tests and bundled experiments run
fully offline. The three modes share one ``complete`` entry point.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol

import requests

from .errors import ConfigError, FixtureExhaustedError, ProviderError, ReplayMissError


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str = "http://localhost:8000/v1"
    model_name: str = "offline-model"
    api_key_env: str = "OPENINTENT_API_KEY"
    temperature: Optional[float] = None
    max_retries: int = 5
    timeout: float = 120.0
    backoff_base: float = 0.5
    max_concurrent: int = 4

    def __post_init__(self):
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.backoff_base < 0:
            raise ConfigError(f"backoff_base must be >= 0, got {self.backoff_base}")
        if self.max_concurrent < 1:
            raise ConfigError(f"max_concurrent must be >= 1, got {self.max_concurrent}")


def prompt_hash(model_name: str, text: str, temperature: Optional[float]) -> str:
    """Content address for one request; replay and fixtures key on this."""
    payload = json.dumps([model_name, text, temperature], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Exchange:
    prompt_hash: str
    request_text: str
    response_text: str
    provenance: str  # "live" | "replay" | "scripted"
    model_name: str
    temperature: Optional[float]
    timestamp: float
    retries: int = 0

    def to_record(self) -> dict:
        return {
            "prompt_hash": self.prompt_hash,
            "request_text": self.request_text,
            "response_text": self.response_text,
            "provenance": self.provenance,
            "model_name": self.model_name,
            "temperature": self.temperature,
            "timestamp": self.timestamp,
            "retries": self.retries,
        }


class ExchangeStore:
    """Append-only JSONL log of exchanges, safe for concurrent writers."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.skipped_lines = 0

    def append(self, exchange: Exchange) -> None:
        line = json.dumps(exchange.to_record(), ensure_ascii=False)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def load_replay_map(self) -> dict[str, str]:
        """hash -> response text; the last record for a hash wins."""
        if not self.path.is_file():
            raise ConfigError(f"replay store not found: {self.path}")
        mapping: dict[str, str] = {}
        self.skipped_lines = 0
        with self.path.open("r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    mapping[record["prompt_hash"]] = record["response_text"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    self.skipped_lines += 1
        if self.skipped_lines:
            warnings.warn(
                f"{self.skipped_lines} corrupt line(s) skipped in {self.path}",
                stacklevel=2,
            )
        return mapping


class Session(Protocol):
    def complete(self, config: ProviderConfig, text: str) -> Exchange: ...


class LiveSession:
    """POSTs to an OpenAI-style /chat/completions endpoint.

    Retries 429 and 5xx responses and connection failures with jittered
    exponential backoff. The API key is read from the configured
    environment variable at call time and never logged or stored.
    """

    RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})

    def __init__(self, record_store: Optional[ExchangeStore] = None, sleep=time.sleep):
        self.record_store = record_store
        self._sleep = sleep
        self._jitter = random.Random()

    def complete(self, config: ProviderConfig, text: str) -> Exchange:
        key = os.environ.get(config.api_key_env, "")
        if not key:
            raise ConfigError(
                f"no API key: set the {config.api_key_env} environment variable"
            )
        url = config.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": config.model_name,
            "messages": [{"role": "user", "content": text}],
        }
        if config.temperature is not None:
            body["temperature"] = config.temperature
        headers = {"Authorization": f"Bearer {key}"}

        last_error = "no attempt made"
        for attempt in range(config.max_retries + 1):
            if attempt:
                delay = config.backoff_base * (2 ** (attempt - 1))
                self._sleep(delay * (1.0 + self._jitter.random()))
            try:
                response = requests.post(
                    url, json=body, headers=headers, timeout=config.timeout
                )
            except requests.RequestException as exc:
                last_error = f"connection error: {exc}"
                continue
            if response.status_code in self.RETRYABLE_STATUS:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.status_code != 200:
                raise ProviderError(
                    f"HTTP {response.status_code} from provider: {response.text[:500]}"
                )
            try:
                content = response.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ProviderError(f"malformed provider response: {exc}") from exc
            exchange = Exchange(
                prompt_hash=prompt_hash(config.model_name, text, config.temperature),
                request_text=text,
                response_text=content,
                provenance="live",
                model_name=config.model_name,
                temperature=config.temperature,
                timestamp=time.time(),
                retries=attempt,
            )
            if self.record_store is not None:
                self.record_store.append(exchange)
            return exchange
        raise ProviderError(
            f"gave up after {config.max_retries + 1} attempt(s); last: {last_error}"
        )


class ReplaySession:
    """Answers from a recorded store; any unseen prompt is an error."""

    def __init__(self, store: ExchangeStore):
        self.store = store
        self._map = store.load_replay_map()

    def complete(self, config: ProviderConfig, text: str) -> Exchange:
        key = prompt_hash(config.model_name, text, config.temperature)
        if key not in self._map:
            raise ReplayMissError(
                f"prompt hash {key} not in replay store {self.store.path}"
            )
        return Exchange(
            prompt_hash=key,
            request_text=text,
            response_text=self._map[key],
            provenance="replay",
            model_name=config.model_name,
            temperature=config.temperature,
            timestamp=0.0,
        )


class ScriptedSession:
    """Answers from a fixture: hash -> FIFO list of response texts.

    Repeated identical prompts consume the list in order, which lets a
    fixture script several runs of the same experiment. A single string
    value is treated as an inexhaustible response.
    """

    def __init__(self, fixture: dict[str, object] | Path | str):
        if not isinstance(fixture, dict):
            path = Path(fixture)
            if not path.is_file():
                raise ConfigError(f"scripted fixture not found: {path}")
            try:
                fixture = json.loads(path.read_text("utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"scripted fixture is not valid JSON: {path}: {exc}")
        if not isinstance(fixture, dict):
            raise ConfigError("scripted fixture must be a JSON object keyed by prompt hash")
        self._constant: dict[str, str] = {}
        self._queues: dict[str, list[str]] = {}
        for key, value in fixture.items():
            if isinstance(value, str):
                self._constant[key] = value
            elif isinstance(value, list) and all(isinstance(v, str) for v in value):
                self._queues[key] = list(value)
            else:
                raise ConfigError(
                    f"fixture value for {key} must be a string or list of strings"
                )

    def complete(self, config: ProviderConfig, text: str) -> Exchange:
        key = prompt_hash(config.model_name, text, config.temperature)
        if key in self._constant:
            response = self._constant[key]
        elif key in self._queues:
            queue = self._queues[key]
            if not queue:
                raise FixtureExhaustedError(
                    f"scripted responses for prompt hash {key} are used up"
                )
            response = queue.pop(0)
        else:
            raise FixtureExhaustedError(f"no scripted response for prompt hash {key}")
        return Exchange(
            prompt_hash=key,
            request_text=text,
            response_text=response,
            provenance="scripted",
            model_name=config.model_name,
            temperature=config.temperature,
            timestamp=0.0,
        )


def complete(config: ProviderConfig, text: str, session: Session) -> Exchange:
    return session.complete(config, text)
