"""End-to-end acceptance checks.

Each criterion prints one ``PASS``/``FAIL`` line (also collected into the
terminal summary). Run alone with ``pytest tests/test_acceptance.py -v``.
The reproduction block trains the full default suite twice, about two minutes.
"""

import csv
import math
import time

import numpy as np
import pytest

import conftest
import oracles
from pinnbc.cli import read_solution, run
from pinnbc.fdm import SampledField, d1, d2, d4, make_grid, sample
from pinnbc.nn import AdamState, ParamGradient, adam_step, init_network
from pinnbc.problems import BarSpec, BeamSpec, CaseLoss, bar_analytic, beam_analytic, loss_gradient
from pinnbc.trainer import case_setup, percent_error


def verdict(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def _ratios(errs):
    return [a / b for a, b in zip(errs, errs[1:])]


def _exactness_error(h, integer_coeffs):
    order = {d1: 1, d2: 2, d4: 4}
    worst = {}
    for op, degree in [(d1, 2), (d2, 3), (d4, 5)]:
        worst[op.__name__] = 0.0
        for seed in range(5):
            rng = np.random.default_rng(seed)
            coeffs = rng.integers(-5, 6, size=degree + 1).astype(float) if integer_coeffs else rng.normal(size=degree + 1)
            poly = np.polynomial.Polynomial(coeffs)
            out = op(sample(poly, make_grid(10 * h, 11, 2)))
            exact = poly.deriv(order[op])(out.x)
            err = np.max(np.abs(out.values - exact)) / np.max(np.abs(exact))
            worst[op.__name__] = max(worst[op.__name__], err)
    return worst


def test_stencil_exactness_representable():
    # dyadic h >= 1e-2 and integer coefficients: float arithmetic is exact, isolating the stencil algebra
    worst = max(max(_exactness_error(h, True).values()) for h in (2.0**-6, 2.0**-4, 2.0**-2, 1.0))
    verdict("stencil exactness (exactly representable data)", worst < 1e-10, f"max relative error {worst:.2e} (< 1e-10)")


@pytest.mark.parametrize("h", [1e-2, 0.05, 0.25])
def test_stencil_exactness_generic(h):
    # generic float data: d4 carries a rounding floor near 16 eps max|p| / h^4
    worst = _exactness_error(h, False)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(f"stencil exactness (generic data, h={h})", max(worst.values()) < 1e-10, f"{detail} (< 1e-10)")


def test_stencil_convergence_order():
    x0, derivs = 0.7, {d1: math.cos(0.7), d2: -math.sin(0.7), d4: math.sin(0.7)}
    ratios = {}
    for op, exact in derivs.items():
        errs = []
        for k in range(4):
            h = 0.2 / 2**k
            field = SampledField(np.sin(x0 + h * np.arange(-2, 3)), make_grid(4 * h, 5, 0))
            errs.append(abs(op(field).at(2) - exact))
        ratios[op.__name__] = _ratios(errs)
    flat = [r for rs in ratios.values() for r in rs]
    ok = all(3.5 <= r <= 4.5 for r in flat)
    verdict("stencil convergence order", ok, f"ratios in [{min(flat):.4f}, {max(flat):.4f}] (want [3.5, 4.5])")


def test_gradient_correctness():
    # 11 nodes keeps the 1/h^4 amplification of the reference's rounding below the tolerance
    n_nodes, worst, where = 11, 0.0, None
    for case in (1, 2, 3, 4):
        spec, strategy = case_setup(case, BarSpec(), BeamSpec(), 100.0, 100.0)
        grid = make_grid(spec.L, n_nodes, 2)
        for seed in range(100):
            net = init_network([1, 8, 8, 1], seed)
            got = loss_gradient(spec, strategy, net, grid).flat()
            ref = oracles.fd_gradient(
                lambda w, b: oracles.case_loss(case, w, b, n_nodes), net.weights, net.biases, 1e-6
            ).astype(float)
            rel = np.max(np.abs(got - ref) / np.maximum(np.maximum(np.abs(got), np.abs(ref)), 1e-300))
            if rel > worst:
                worst, where = rel, (case, seed)
    verdict(
        "gradient correctness",
        worst < 1e-5,
        f"worst per-parameter relative error {worst:.2e} at case/seed {where} (< 1e-5)",
    )


def test_analytic_oracle():
    bar, beam = BarSpec(), BeamSpec()
    ns = (11, 21, 41, 81)
    bar_res, beam_res, beam_curv, bar_neumann = [], [], [], []
    exact_bcs = [abs(bar_analytic(bar, 0.0)), abs(beam_analytic(beam, 0.0)), abs(beam_analytic(beam, beam.L))]

    def w(x):
        d = -math.sin(beam.L) / (6 * beam.L)
        b = math.sin(beam.L) / beam.L - d * beam.L**2
        return b * x + d * x**3 - np.sin(x)

    for n in ns:
        g = make_grid(bar.L, n, 1)
        u = SampledField(oracles.bar_solution(g.nodes), g)
        bar_res.append(np.max(np.abs(d2(u).on_physical() + g.x)))
        bar_neumann.append(abs(d1(u).at(g.right)))
        g = make_grid(beam.L, n, 2)
        f = SampledField(w(g.nodes), g)
        beam_res.append(np.max(np.abs(d4(f).on_physical() + np.sin(g.x))))
        c = d2(f)
        beam_curv.append(max(abs(c.at(g.left)), abs(c.at(g.right))))
    checks = {
        "beam residual O(h^2)": all(3.5 <= r <= 4.5 for r in _ratios(beam_res)),
        "bar residual at round-off (cubic)": max(bar_res) < 1e-8,
        "bar u'(L) O(h^2)": all(3.5 <= r <= 4.5 for r in _ratios(bar_neumann)),
        "beam w'' ends O(h^2) or exact": max(beam_curv) < 1e-12 or all(3.5 <= r <= 4.5 for r in _ratios(beam_curv)),
        "Dirichlet values < 1e-12": max(exact_bcs) < 1e-12,
    }
    failed = [k for k, v in checks.items() if not v]
    verdict(
        "analytic-oracle verification",
        not failed,
        f"beam residual ratios {np.round(_ratios(beam_res), 3).tolist()}; "
        f"bar max residual {max(bar_res):.1e}; failed={failed}",
    )


def test_adam_oracle():
    net = init_network([1, 3, 1], seed=7)
    theta0 = net.flat().copy()
    grads = np.random.default_rng(7).normal(size=(10, net.n_params))
    state = AdamState()
    for g in grads:
        probe = net.with_flat(g)
        net, state = adam_step(net, ParamGradient(probe.weights, probe.biases), state)
    ref = np.array(oracles.adam_scalar(theta0, grads.T))
    rel = np.max(np.abs(net.flat() - ref) / np.abs(ref))
    verdict("adam oracle", rel < 1e-12, f"max relative deviation {rel:.1e} after 10 steps (< 1e-12)")


def test_hard_bc_exactness():
    bar_spec, bar_strategy = case_setup(1, BarSpec(), BeamSpec(), 100.0, 100.0)
    beam_spec, beam_strategy = case_setup(3, BarSpec(), BeamSpec(), 100.0, 100.0)
    bar_loss = CaseLoss(bar_spec, bar_strategy, make_grid(bar_spec.L, 101, 2))
    beam_loss = CaseLoss(beam_spec, beam_strategy, make_grid(beam_spec.L, 101, 2))
    u0 = w0 = 0.0
    wl_ratio = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        widths = tuple(int(v) for v in rng.integers(2, 33, size=rng.integers(1, 4)))
        net = init_network((1, *widths, 1), seed)
        u = bar_loss.field(net)
        u0 = max(u0, abs(u.at(u.grid.left)))
        w = beam_loss.field(net)
        w0 = max(w0, abs(w.at(w.grid.left)))
        f_max = np.max(np.abs(net(w.grid.nodes)))
        wl_ratio = max(wl_ratio, abs(w.at(w.grid.right)) / (1e-12 * f_max))
    ok = u0 == 0.0 and w0 == 0.0 and wl_ratio <= 1.0
    verdict("hard-BC exactness", ok, f"max|U(0)|={u0}, max|W(0)|={w0}, max|W(L)|/(1e-12 max|F|)={wl_ratio:.3f}")


# ---- full default suite, run twice through the CLI ----


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture(scope="module")
def suite_runs(tmp_path_factory):
    outs, cpu, codes = [], [], []
    for k in range(2):
        out = tmp_path_factory.mktemp(f"suite{k}")
        start = time.process_time()
        codes.append(run(["run", "--suite", "--out", str(out)]))
        cpu.append(time.process_time() - start)
        outs.append(out)
    _, rows = _read_csv(outs[0] / "summary.csv")
    summary = {int(r[0]): tuple(float(v) for v in r[1:]) for r in rows}
    return {"outs": outs, "cpu": cpu, "codes": codes, "summary": summary}


@pytest.mark.slow
def test_reproduction_case1(suite_runs):
    err = suite_runs["summary"][1][0]
    verdict("reproduction: case 1 < 2 %", err < 2.0, f"{err:.4f} %")


@pytest.mark.slow
def test_reproduction_case2(suite_runs):
    err = suite_runs["summary"][2][0]
    verdict("reproduction: case 2 < 2 %", err < 2.0, f"{err:.4f} %")


@pytest.mark.slow
def test_reproduction_case3(suite_runs):
    err = suite_runs["summary"][3][0]
    verdict("reproduction: case 3 < 5 %", err < 5.0, f"{err:.4f} %")


@pytest.mark.slow
def test_reproduction_ordering(suite_runs):
    e3, e4 = suite_runs["summary"][3][0], suite_runs["summary"][4][0]
    verdict("reproduction: case 4 > 2 x case 3", e4 > 2 * e3, f"{e4:.4f} % vs 2 x {e3:.4f} %")


@pytest.mark.slow
def test_reproduction_endpoints(suite_runs):
    _, a3, b3 = suite_runs["summary"][3]
    _, a4, b4 = suite_runs["summary"][4]
    ok = a3 == 0.0 and b3 == 0.0 and a4 > 0.0 and b4 > 0.0
    verdict("reproduction: endpoint deviations", ok, f"case 3 ({a3}, {b3}); case 4 ({a4:.3e}, {b4:.3e})")


@pytest.mark.slow
def test_reproduction_runtime(suite_runs):
    cpu = suite_runs["cpu"][0]
    verdict("reproduction: suite runtime < 5 min CPU", cpu < 300, f"{cpu:.1f} s")


@pytest.mark.slow
def test_loss_trend(suite_runs):
    trends = {}
    for n in range(1, 5):
        _, rows = _read_csv(suite_runs["outs"][0] / f"case{n}" / "history.csv")
        epochs = np.array([int(r[0]) for r in rows])
        total = np.array([float(r[1]) for r in rows])
        last = epochs.max()
        trends[n] = (total[epochs < 1000].mean(), total[epochs > last - 1000].mean())
    ok = all(tail < head for head, tail in trends.values())
    detail = "; ".join(f"case {n}: {h:.3e} -> {t:.3e}" for n, (h, t) in trends.items())
    verdict("property: loss history trends down", ok, detail)


@pytest.mark.slow
def test_determinism(suite_runs):
    a, b = (out / "summary.csv" for out in suite_runs["outs"])
    same = a.read_bytes() == b.read_bytes() and suite_runs["codes"] == [0, 0]
    verdict("determinism", same, f"summary.csv byte-identical across two runs: {same}")


@pytest.mark.slow
def test_csv_round_trip(suite_runs):
    worst = 0.0
    for n in range(1, 5):
        _, pred, exact, _ = read_solution(suite_runs["outs"][0] / f"case{n}" / "solution.csv")
        reported = suite_runs["summary"][n][0]
        worst = max(worst, abs(percent_error(pred, exact) - reported) / reported)
    verdict("csv round-trip", worst < 1e-9, f"max relative mismatch {worst:.1e} (< 1e-9)")


@pytest.mark.slow
def test_suite_gap_example(suite_runs):
    e = {n: v[0] for n, v in suite_runs["summary"].items()}
    bar_gap, beam_gap = abs(e[1] - e[2]), e[4] - e[3]
    verdict("suite: bar gap small next to beam gap", bar_gap < beam_gap, f"|e1-e2|={bar_gap:.4f} vs e4-e3={beam_gap:.4f}")
