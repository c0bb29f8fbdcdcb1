"""Smoke test for the rtc extension module."""

import json

import rtc

EXPERIMENT = """
block_size = 10
top_k = 3
timing_runs = 1

[dataset]
kind = "synthetic"
count = 600
seed = 1
"""


def main():
    # two-member team, two free agents
    space = rtc.ObjectSpace(
        ["a", "b"],
        [
            (1, "R1", 2.0, [3.0, 1.0]),
            (2, "R2", 1.0, [9.0, 5.0]),
            (3, "P1", 1.0, [4.0, 6.0]),
            (4, "P2", 1.0, [1.0, 1.0]),
        ],
    )
    assert len(space) == 4 and space.dimension == 2

    q = rtc.Query(space, [1, 2], [10.0, 10.0])
    assert q.team_aggregate() == [12.0, 6.0]
    assert q.initial_distance() == 4.0

    bf, bf_reads = q.brute_force(top_k=3, block_size=2)
    star, stats = q.rtc_star(top_k=3, block_size=2)
    assert bf == star, (bf, star)
    assert bf_reads == 2 * 2
    assert stats["lookup_blocks"] == 2
    print("top pair:", bf[0])

    values, clipped = q.virtual_object(1)
    assert values == [0.0, 2.5] and not clipped

    assert rtc.kendall_tau([1, 2, 3, 4], [1, 3, 2, 4]) == 4 / 6
    w = rtc.compute_weights([[1, 7], [2, 7], [3, 7]], [10, 20, 30])
    assert w == [1.0, 1e-6]

    target, dist = rtc.select_target(space, [4], {"X": [2.0, 1.0], "Y": [1.0, 3.0]})
    assert (target, dist) == ("X", 1.0)

    syn = rtc.gen_synthetic(5000, seed=3)
    assert syn.digest() == rtc.gen_synthetic(5000, seed=3).digest()
    fg = [syn.get(i)[3][0] for i in syn.ids()]
    gof = rtc.chi_square_gof(fg, 1.44, 0.008)
    print("FG gof:", gof)

    try:
        rtc.Query(space, [99], [1.0, 1.0])
    except rtc.RtcError as e:
        print("expected error:", e)
    else:
        raise AssertionError("unknown member accepted")

    report = json.loads(rtc.run_experiment(EXPERIMENT))
    assert all(row["methods_agree"] for row in report["rows"])
    print("experiment rows:", len(report["rows"]))
    print("ok")


if __name__ == "__main__":
    main()
