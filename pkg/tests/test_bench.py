from collections import Counter

import pytest

from braunheap import bench
from braunheap.bench import (
    CSV_HEADER, STRUCTURES, TASKS, BenchConfig, BenchResult, ConfigError, emit_csv, main,
    parse_matrix, run_task, sweep, thread_plan,
)


def small(task, structure="locked-array", **kw):
    base = dict(threads=1, init_size=256, total_ops=8, warmup_runs=0, measured_runs=1)
    base.update(kw)
    return BenchConfig(task, structure, **base)


def fake_result(cfg):
    return BenchResult(cfg, 1.0, 0.5, [1.0])


class TestConfig:
    def test_ops_must_divide(self):
        with pytest.raises(ConfigError):
            BenchConfig("mixed", "braun", threads=5)

    @pytest.mark.parametrize("kw", [
        dict(task="nope"), dict(structure="skiplist"), dict(threads=0), dict(init_size=0),
        dict(measured_runs=0),
    ])
    def test_invalid(self, kw):
        args = dict(task="insert", structure="braun")
        args.update(kw)
        with pytest.raises(ConfigError):
            BenchConfig(**args)

    def test_defaults(self):
        c = BenchConfig("insert", "braun")
        assert (c.init_size, c.total_ops, c.warmup_runs, c.measured_runs) == (1 << 20, 1344, 10, 40)


def test_mixed_eight_threads_do_168_each():
    r = run_task(BenchConfig("mixed", "locked-array", threads=8, init_size=2048,
                             warmup_runs=0, measured_runs=1))
    assert r.per_thread_ops == [[168] * 8]


@pytest.mark.parametrize("structure", STRUCTURES)
def test_snap_only_one_snapshot_per_run(structure):
    r = run_task(small("snap-only", structure, measured_runs=3))
    assert r.op_counts == Counter(snapshot=3)


def test_same_seed_same_streams():
    c = BenchConfig("mixed", "braun", threads=4)
    assert thread_plan(c, 3, 2) == thread_plan(c, 3, 2)
    assert thread_plan(c, 3, 2) != thread_plan(c, 3, 1)
    other = BenchConfig("mixed", "locked-array", threads=4)
    assert thread_plan(c, 0, 0) == thread_plan(other, 0, 0)


@pytest.mark.parametrize("structure", STRUCTURES)
def test_insert_task_conserves_multiset(structure):
    cfg = small("insert", structure, total_ops=64, threads=4, measured_runs=2)
    r = run_task(cfg)
    assert r.final_size == cfg.init_size + cfg.total_ops


def test_remove_min_task_size():
    cfg = small("remove-min", "braun", total_ops=64, threads=2)
    assert run_task(cfg).final_size == cfg.init_size - 64


def test_braun_records_alloc_stats():
    r = run_task(small("snap-insert", "braun", total_ops=16, threads=2))
    allocated, peeled = r.alloc_stats
    assert allocated >= 16 and peeled > 0
    assert run_task(small("snap-insert")).alloc_stats is None


class TestCsv:
    def test_empty(self):
        assert emit_csv([]) == CSV_HEADER + "\n"

    def test_single(self):
        out = emit_csv([fake_result(small("sum"))]).splitlines()
        assert len(out) == 2 and out[1] == "sum,locked-array,1,256,1.0000,0.5000"

    def test_full_matrix_line_count_and_order(self):
        cfgs = [BenchConfig(t, s, threads=n) for t in TASKS for s in STRUCTURES for n in (8, 4, 2, 1)]
        lines = emit_csv([fake_result(c) for c in reversed(cfgs)]).splitlines()
        assert len(lines) == 49
        keys = [tuple(l.split(",")[:3]) for l in lines[1:]]
        assert keys == sorted(keys, key=lambda k: (k[0], k[1], int(k[2])))


class TestSweep:
    def test_one_by_one(self):
        assert len(sweep([small("insert")])) == 1

    def test_dedupes(self):
        seen = []
        res = sweep([small("insert")] * 3 + [small("sum")],
                    progress=lambda i, n, c: seen.append((i, n)))
        assert len(res) == 2 and seen == [(1, 2), (2, 2)]

    def test_full_matrix_smoke(self):
        cfgs = parse_matrix("task=all structure=all threads=1,2,4,8",
                            dict(init_size=128, total_ops=8, warmup_runs=0, measured_runs=1))
        text = emit_csv(sweep(cfgs))
        lines = text.splitlines()
        assert lines[0] == CSV_HEADER and len(lines) == 49
        for line in lines[1:]:
            task, structure, threads, init, mean, std = line.split(",")
            assert task in TASKS and structure in STRUCTURES and float(mean) >= 0


class TestMatrixFile:
    def test_product_and_defaults(self):
        cfgs = parse_matrix("# comment\ntask=insert,sum structure=braun threads=1,2 runs=3\n",
                            dict(init_size=99))
        assert len(cfgs) == 4
        assert all(c.init_size == 99 and c.measured_runs == 3 for c in cfgs)

    @pytest.mark.parametrize("text", ["task=insert", "task=insert structure=braun bogus=1",
                                      "task=insert structure=braun threads=x", "structure=braun"])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_matrix(text)


class TestCli:
    def test_writes_csv(self, tmp_path):
        out = tmp_path / "r.csv"
        rc = main(["--task", "insert", "--structure", "braun", "--threads", "1,2",
                   "--init-size", "64", "--ops", "8", "--warmup", "0", "--runs", "2",
                   "--out", str(out), "-q"])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER and len(lines) == 3

    def test_sweep_file(self, tmp_path, capsys):
        m = tmp_path / "m.txt"
        m.write_text("task=sum structure=all\ntask=snap-only structure=braun threads=2\n")
        rc = main(["--sweep", str(m), "--threads", "1", "--init-size", "32", "--ops", "2",
                   "--warmup", "0", "--runs", "1", "-q"])
        assert rc == 0
        assert len(capsys.readouterr().out.splitlines()) == 4

    @pytest.mark.parametrize("argv", [
        ["--task", "nope"], ["--threads", "5"], ["--init-size", "0"], ["--sweep", "/no/such/file"],
    ])
    def test_config_errors_exit_2(self, argv, capsys):
        assert main(argv + ["-q"]) == 2
        assert "error" in capsys.readouterr().err

    def test_bad_flag_exit_2(self):
        with pytest.raises(SystemExit) as e:
            main(["--frobnicate"])
        assert e.value.code == 2
