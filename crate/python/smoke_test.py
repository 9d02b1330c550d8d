"""Smoke test for the sjaya extension module."""

import math

import sjaya


def main():
    names = sjaya.benchmarks()
    assert len(names) == 12 and names[0] == "ackley", names
    assert sjaya.benchmark_spec("goldstein-price") == (2, -2.0, 2.0, 3.0)
    assert sjaya.evaluate("goldstein-price", [0.0, -1.0]) == 3.0

    trace = sjaya.run("sphere", variant="sjaya", pop=20, gens=200, seed=3)
    assert trace.evals == 20 * 201
    bests = [b for _, b in trace.improvements]
    assert bests == sorted(bests, reverse=True)
    assert trace.best_fitness == bests[-1]
    again = sjaya.run("sphere", variant="sjaya", pop=20, gens=200, seed=3)
    assert again.improvements == trace.improvements

    summary, records = sjaya.execute_batch("matyas", "jaya", pop=10, gens=100, runs=4, base_seed=9)
    assert [r[0] for r in records] == [9, 10, 11, 12]
    assert summary["fit_best"] == min(r[1] for r in records)

    cost = sjaya.stack_cost(22, 1, 148.4418)
    assert abs(cost - 13.6157) < 5e-5, cost
    p, v, i = sjaya.max_power_point(22, 1, 148.4418)
    assert p > 200 and 12 < v < 12.5 and i > 0

    t, df, p = sjaya.welch_t((1.0, 0.5, 30), (0.8, 0.4, 30))
    assert t > 0 and 55 < df < 58 and 0 < p < 0.5
    assert sjaya.welch_t((1.0, 0.0, 30), (1.0, 0.0, 30)) is None
    assert abs(sjaya.t_sf(0.0, 10.0) - 0.5) < 1e-15
    assert abs(sjaya.normal_cdf(1.96) - 0.975) < 1e-3

    mean, std, z, p = sjaya.signed_rank_normal(19, 15)
    assert mean == 95.0 and abs(std - 24.8495) < 1e-4
    assert abs(z + 3.2194) < 1e-3 and f"{p:.4f}" == "0.0006"

    pairs = [(0.0, float(k)) for k in range(1, 6)] + [(float(k), 0.0) for k in range(6, 20)]
    w = sjaya.wilcoxon(pairs)
    assert (w["n"], w["w_plus"], w["w_minus"], w["critical_w"]) == (19, 175.0, 15.0, 53)
    assert math.isclose(w["z"], z)

    try:
        sjaya.run("rastrigin")
    except ValueError as e:
        assert "rastrigin" in str(e)
    else:
        raise AssertionError("unknown problem accepted")

    print("sjaya smoke test passed")


if __name__ == "__main__":
    main()
