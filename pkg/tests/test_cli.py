"""Command-line entry points, exercised in-process through main(argv).

Scripted fixtures are rebuilt here exactly the way the runner renders
prompts, so these are thin wiring tests: flag parsing, session
selection, exit codes, and the text the commands print.
"""

import json

import pytest

from openintent.cli import main
from openintent.corpus import read_split
from openintent.prompts import PromptVariant
from openintent.runner import ExperimentConfig

from conftest import (
    grouped_response,
    hash_for,
    scripted_discovery,
    scripted_gid,
    small_split_config,
    write_corpus,
)

SIZE_FLAGS = [
    "--n-ind", "2", "--m-ood", "2", "--discovery-per-class", "3",
    "--gid-per-class", "2", "--demos-per-class", "1",
]


@pytest.fixture
def corpus_path(tmp_path):
    path = tmp_path / "corpus.jsonl"
    write_corpus(path)
    return path


@pytest.fixture
def split_path(tmp_path, corpus_path):
    path = tmp_path / "split.json"
    code = main(["split", "--corpus", str(corpus_path), *SIZE_FLAGS,
                 "--seed", "5", "--out", str(path)])
    assert code == 0
    return path


def write_fixture(tmp_path, mapping, name="fixture.json"):
    path = tmp_path / name
    path.write_text(json.dumps(mapping), encoding="utf-8")
    return path


def discovery_fixture(tmp_path, split_path, runs, seed, **config_kwargs):
    split = read_split(split_path)
    config = ExperimentConfig(
        split_path=split_path, split=small_split_config(),
        runs=runs, seed=seed, **config_kwargs,
    )
    return write_fixture(
        tmp_path, scripted_discovery(config, split, grouped_response)
    )


class TestSplitCommand:
    def test_writes_split_and_prints_shape(self, tmp_path, corpus_path, capsys):
        out = tmp_path / "split.json"
        code = main(["split", "--corpus", str(corpus_path), *SIZE_FLAGS,
                     "--seed", "5", "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert f"wrote {out}" in stdout
        assert "2 IND / 2 OOD" in stdout
        assert "discovery 6, gid test 8, ratio 1:1" in stdout
        split = read_split(out)
        assert len(split.discovery_pool) == 6

    def test_same_seed_same_bytes(self, tmp_path, corpus_path):
        outs = [tmp_path / "a.json", tmp_path / "b.json"]
        for out in outs:
            assert main(["split", "--corpus", str(corpus_path), *SIZE_FLAGS,
                         "--seed", "5", "--out", str(out)]) == 0
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_needs_class_counts(self, tmp_path, corpus_path, capsys):
        code = main(["split", "--corpus", str(corpus_path),
                     "--out", str(tmp_path / "split.json")])
        assert code == 2
        assert "split" in capsys.readouterr().err

    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == 2


class TestDiscoverCommand:
    def test_scripted_run_reports_and_writes(self, tmp_path, split_path, capsys):
        fixture = discovery_fixture(tmp_path, split_path, runs=2, seed=9)
        outs = [tmp_path / "r1.json", tmp_path / "r2.json"]
        for out in outs:
            code = main(["discover", "--split", str(split_path),
                         "--runs", "2", "--seed", "9",
                         "--scripted", str(fixture), "--out", str(out)])
            assert code == 0
        stdout = capsys.readouterr().out
        assert "[discovery] runs=2 mean acc=1.0000 ari=1.0000 nmi=1.0000" in stdout
        assert f"wrote {outs[0]}" in stdout
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_unparseable_response_exits_4(self, tmp_path, split_path, capsys):
        fixture = discovery_fixture(tmp_path, split_path, runs=1, seed=9)
        mapping = {key: "no categories here" for key in
                   json.loads(fixture.read_text(encoding="utf-8"))}
        bad = write_fixture(tmp_path, mapping, "bad.json")
        code = main(["discover", "--split", str(split_path),
                     "--runs", "1", "--seed", "9", "--scripted", str(bad)])
        assert code == 4
        assert "error:" in capsys.readouterr().err

    def test_fixture_miss_exits_3(self, tmp_path, split_path, capsys):
        fixture = write_fixture(tmp_path, {"feedbeef": "Category 1: 1"})
        code = main(["discover", "--split", str(split_path),
                     "--runs", "1", "--scripted", str(fixture)])
        assert code == 3
        assert "error:" in capsys.readouterr().err

    def test_replay_miss_exits_3(self, tmp_path, split_path, capsys):
        store = tmp_path / "log.jsonl"
        store.touch()
        code = main(["discover", "--split", str(split_path),
                     "--runs", "1", "--replay", str(store)])
        assert code == 3
        assert "error:" in capsys.readouterr().err

    def test_missing_replay_store_exits_2(self, tmp_path, split_path):
        code = main(["discover", "--split", str(split_path),
                     "--replay", str(tmp_path / "absent.jsonl")])
        assert code == 2

    def test_scripted_and_replay_conflict(self, tmp_path, split_path, capsys):
        code = main(["discover", "--split", str(split_path),
                     "--scripted", str(tmp_path / "f.json"),
                     "--replay", str(tmp_path / "log.jsonl")])
        assert code == 2
        assert "mutually exclusive" in capsys.readouterr().err

    def test_record_only_pairs_with_live(self, tmp_path, split_path, capsys):
        code = main(["discover", "--split", str(split_path),
                     "--scripted", str(tmp_path / "f.json"),
                     "--record", str(tmp_path / "log.jsonl")])
        assert code == 2
        assert "live sessions only" in capsys.readouterr().err


class TestGidCommand:
    def test_ground_truth_scripted_run(self, tmp_path, split_path, capsys):
        split = read_split(split_path)
        config = ExperimentConfig(
            split_path=split_path, split=small_split_config(),
            runs=1, seed=4, intent_set_source="ground_truth",
        )
        fixture = write_fixture(tmp_path, scripted_gid(config, split))
        out = tmp_path / "gid.json"
        code = main(["gid", "--split", str(split_path), "--runs", "1",
                     "--seed", "4", "--intent-set", "ground_truth",
                     "--scripted", str(fixture), "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "[gid] runs=1 mean" in stdout
        assert "all_acc=1.0000" in stdout
        assert out.is_file()


class TestEstimateKCommand:
    def test_count_free_scripted_run(self, tmp_path, split_path, capsys):
        fixture = discovery_fixture(
            tmp_path, split_path, runs=2, seed=9, include_cluster_count=False
        )
        code = main(["estimate-k", "--split", str(split_path),
                     "--runs", "2", "--seed", "9", "--scripted", str(fixture)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "[estimate_k] runs=2 mean k_error=0.0000 k_pred=2.0000" in stdout


class TestStudyCommand:
    def test_no_axes_is_config_error(self, tmp_path, split_path, capsys):
        code = main(["study", "--split", str(split_path),
                     "--scripted", str(tmp_path / "f.json")])
        assert code == 2
        assert "no study axes" in capsys.readouterr().err

    def test_variant_axis_labels(self, tmp_path, split_path, capsys):
        split = read_split(split_path)
        mapping = {}
        for variant in PromptVariant:
            config = ExperimentConfig(
                split_path=split_path, split=small_split_config(),
                runs=1, seed=7, variant=variant,
            )
            mapping.update(scripted_discovery(config, split, grouped_response))
        fixture = write_fixture(tmp_path, mapping)
        code = main(["study", "--split", str(split_path), "--runs", "1",
                     "--seed", "7", "--variant-study", "--scripted", str(fixture)])
        assert code == 0
        stdout = capsys.readouterr().out
        for tag in ("variant=original", "variant=paraphrase",
                    "variant=verbosity", "variant=simplification"):
            assert f"[discovery {tag}]" in stdout


class TestReportCommand:
    def test_rerenders_json_to_markdown(self, tmp_path, split_path, capsys):
        fixture = discovery_fixture(tmp_path, split_path, runs=2, seed=9)
        report = tmp_path / "report.json"
        assert main(["discover", "--split", str(split_path),
                     "--runs", "2", "--seed", "9",
                     "--scripted", str(fixture), "--out", str(report)]) == 0
        rendered = tmp_path / "report.md"
        code = main(["report", "--in", str(report),
                     "--format", "markdown", "--out", str(rendered)])
        assert code == 0
        assert f"wrote {rendered}" in capsys.readouterr().out
        assert "| ACC |" in rendered.read_text(encoding="utf-8")

    def test_missing_input_exits_2(self, tmp_path, capsys):
        code = main(["report", "--in", str(tmp_path / "absent.json"),
                     "--format", "csv", "--out", str(tmp_path / "out.csv")])
        assert code == 2
        assert "not found" in capsys.readouterr().err
