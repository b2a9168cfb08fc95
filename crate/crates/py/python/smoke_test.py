"""Smoke test for the henson extension module. Run after `maturin develop`."""

from pathlib import Path

import henson

CONFIGS = Path(__file__).resolve().parents[3] / "configs"


def main():
    p = henson.Presentation(3)
    assert p.restriction(0) == "?"
    for i in range(30):
        for j in range(i):
            for k in range(j):
                assert not (p.adjacent(i, j) and p.adjacent(j, k) and p.adjacent(i, k))
    x = p.find_extension([0], [1], 10)
    assert x > 10 and p.adjacent(0, x) and not p.adjacent(1, x)

    cert = henson.folkman_witness(3, 2, 6)
    assert cert.vertices == 5 and cert.edges == 5
    assert henson.partition_ramsey_check(cert.graph6, 3, 2)
    try:
        henson.folkman_witness(3, 2, 4)
    except henson.ExhaustedError:
        pass
    else:
        raise AssertionError("expected exhaustion")

    config = henson.RunConfig.parse((CONFIGS / "sample.toml").read_text())
    assert (config.n, config.stages, len(config.adversaries)) == (3, 5000, 4)
    result = henson.run(config)
    assert len(result.coloring) == 5001 and set(result.coloring) <= {"R", "B"}
    report = henson.verify_trace(config, result.trace_jsonl, result.coloring_text)
    assert report.all_passed, str(report)

    record = '{"kind":"Colored","stage":100,"vertex":100,"color":"'
    at = result.trace_jsonl.index(record) + len(record)
    flipped = "B" if result.trace_jsonl[at] == "R" else "R"
    bad = result.trace_jsonl[:at] + flipped + result.trace_jsonl[at + 1:]
    report = henson.verify_trace(config, bad, result.coloring_text)
    assert "V1" in report.failed_checks
    print("smoke test passed")


if __name__ == "__main__":
    main()
