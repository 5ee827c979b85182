"""End-to-end acceptance criteria.

Each test prints one ``[criterion N] PASS|FAIL`` line with the measured
numbers, then asserts. Monte Carlo criteria take minutes on one core.
"""
import math

import numpy as np
import pytest

from ldpcsched.codes import CodeSpec, construct_regular_code, is_codeword, syndrome
from ldpcsched.harness import ExperimentPlan, iteration_profile, run_sweep, write_report_csv
from ldpcsched.instrumentation import (
    LatencyModel,
    latency_estimate,
    memory_estimate,
    per_iteration_ops,
    reference_latency_rows,
)
from ldpcsched.kernels import L_MAX, c2v_rule
from ldpcsched.schedulers import ALGORITHMS, DecoderConfig, decode, reliability_state, select_active_set

from conftest import random_tree_code
from test_kernels import map_log_ratios

pytestmark = pytest.mark.acceptance

# converged-flag audit shared by every criterion that decodes
AUDIT = {"decodes": 0, "unsound": 0}

BOOTSTRAP = 2000
CODEWORDS = 5000


@pytest.fixture
def verdict(capsys):
    def emit(label, passed, detail):
        with capsys.disabled():
            print(f"\n[criterion {label}] {'PASS' if passed else 'FAIL'}  {detail}")
        return passed
    return emit


def _audit_profile(profile, count):
    AUDIT["decodes"] += count
    AUDIT["unsound"] += profile.unsound_converged


def _audit_report(report):
    for r in report.rows:
        AUDIT["decodes"] += r.codewords
        AUDIT["unsound"] += r.unsound_converged


# -- 1: exactness on cycle-free codes ------------------------------------------------------


def test_criterion_1_tree_map_oracle(verdict):
    rng = np.random.default_rng(1)
    worst = 0.0
    codes = 0
    while codes < 25:
        g = random_tree_code(rng)
        llrs = np.clip(rng.normal(0.5, 1.5, g.n), -4, 4)
        exact = map_log_ratios(g, llrs)
        if np.abs(exact).max() > 0.8 * L_MAX:
            continue
        res = decode(g, llrs, DecoderConfig("flooding", t_max=2 * g.n, early_stop=False))
        worst = max(worst, float(np.abs(res.final_posterior - exact).max()))
        codes += 1
    ok = verdict(1, worst <= 1e-9, f"{codes} tree codes (n <= 16), max |BP - MAP| = {worst:.2e}")
    assert ok


# -- 2: analytic cost model ---------------------------------------------------------------------


def test_criterion_2_analytic_model(verdict):
    p = dict(n=2048, m=1024, e=6144, dv=3, dc=6, k=8)
    res_ops = per_iteration_ops("arcid", **p).total_ops
    bp_ops = per_iteration_ops("bp", **p).total_ops
    lat = {
        "arcid": latency_estimate(LatencyModel(1.2e9, 0.7, 4.5), per_iteration_ops("arcid", **p)),
        "rp": latency_estimate(LatencyModel(1.2e9, 0.7, 10), per_iteration_ops("rp", **p)),
        "bp": latency_estimate(LatencyModel(1.2e9, 0.7, 250), per_iteration_ops("bp", **p)),
    }
    cited = {"arcid": 4.74e-3, "rp": 10.53e-3, "bp": 14.63e-3}
    lat_ok = all(abs(lat[k] - cited[k]) / cited[k] <= 0.005 for k in cited)
    mem = memory_estimate(2048, 1024, 6144)
    rbp = {r["decoder"]: r for r in reference_latency_rows()}["rbp"]
    rbp_ok = (not rbp["consistent"]) and abs(rbp["formula_s"] - 15.80e-3) / 15.80e-3 <= 0.005
    ok = res_ops == 884_736 and bp_ops == 49_152 and lat_ok and mem == 95_232 and rbp_ok
    detail = (f"ops {res_ops}/{bp_ops}, latency " + ", ".join(f"{k} {v * 1e3:.2f} ms" for k, v in lat.items())
              + f", memory {mem} B, rbp 15 it -> {rbp['formula_s'] * 1e3:.2f} ms flagged vs cited 12.64 ms")
    verdict(2, ok, detail)
    assert ok


# -- 3: iteration profile on the (512, 256) code ---------------------------------------------------------


@pytest.fixture(scope="module")
def profile_512():
    plan = ExperimentPlan(
        code=CodeSpec(512, 256, 3, 6), code_seed=1,
        decoders=(DecoderConfig("arcid"), DecoderConfig("rbp"), DecoderConfig("flooding")),
        snr_points_db=(3.5,), max_codewords=CODEWORDS, master_seed=2024,
    )
    prof = iteration_profile(plan, 3.5)
    _audit_profile(prof, 3 * CODEWORDS)
    return prof


def _within_band(value, target, factor=3.0):
    return target / factor <= value <= target * factor


def test_criterion_3_ber_band(profile_512, verdict):
    b3 = profile_512.ber("arcid", 3)
    b5 = profile_512.ber("arcid", 5)
    ok = _within_band(b3, 8e-3) and _within_band(b5, 1.5e-3)
    verdict("3 (BER band)", ok,
            f"AR-CID BER at cap 3 = {b3:.3e} (band [{8e-3 / 3:.2e}, {2.4e-2:.2e}]), "
            f"at cap 5 = {b5:.3e} (band [{1.5e-3 / 3:.2e}, {4.5e-3:.2e}]), {CODEWORDS} codewords")
    assert ok


def test_criterion_3_iteration_ordering(profile_512, verdict):
    it = profile_512.iterations
    a, r, f = (it["arcid"].astype(float), it["rbp"].astype(float), it["flooding"].astype(float))
    rng = np.random.default_rng(7)
    idx = rng.integers(0, a.size, size=(BOOTSTRAP, a.size))
    ma, mr, mf = a[idx].mean(axis=1), r[idx].mean(axis=1), f[idx].mean(axis=1)
    confidence = float(np.mean((ma < mr) & (mr < mf)))
    ok = confidence >= 0.95
    verdict("3 (ordering)", ok,
            f"mean iterations AR-CID {a.mean():.3f}, RBP {r.mean():.3f}, flooding {f.mean():.3f}; "
            f"bootstrap confidence of AR-CID < RBP < flooding = {confidence:.3f}")
    assert ok


# -- 4: (2048, 1024) spot check ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def profile_2048():
    plan = ExperimentPlan(
        code=CodeSpec(2048, 1024, 3, 6), code_seed=7,
        decoders=(DecoderConfig("arcid", t_max=7), DecoderConfig("flooding", t_max=7)),
        snr_points_db=(4.0,), max_codewords=CODEWORDS, master_seed=4096,
    )
    prof = iteration_profile(plan, 4.0)
    _audit_profile(prof, 2 * CODEWORDS)
    return prof


def test_criterion_4_ber_band(profile_2048, verdict):
    b = profile_2048.ber("arcid", 7)
    ok = _within_band(b, 6.16e-4)
    verdict("4 (BER band)", ok,
            f"AR-CID BER at 4.0 dB, T_max 7 = {b:.3e} (band [{6.16e-4 / 3:.2e}, {6.16e-4 * 3:.2e}]), "
            f"{CODEWORDS} codewords")
    assert ok


def test_criterion_4_below_flooding(profile_2048, verdict):
    a = profile_2048.ber("arcid", 7)
    f = profile_2048.ber("flooding", 7)
    ok = a < f
    verdict("4 (vs flooding)", ok, f"AR-CID BER {a:.3e} vs flooding BER {f:.3e}")
    assert ok


# -- 5: property suites ----------------------------------------------------------------------------


def _suite_reliability(rng, g, count):
    for _ in range(count):
        alpha = rng.random()
        lam = rng.random()
        gamma = rng.random() * 2
        post = rng.normal(0, rng.uniform(0.5, 10), g.n)
        prev = rng.normal(0, rng.uniform(0.5, 10), g.n)
        rel = reliability_state(g, post, prev, alpha, 1 - alpha)
        assert ((rel.r_v >= 0) & (rel.r_v <= 3)).all()
        assert ((rel.delta_y >= 0) & (rel.delta_y <= 1)).all()
        assert np.array_equal(rel.metric, alpha * rel.r_v + (1 - alpha) * rel.delta_y)
        assert (rel.metric <= alpha * 3 + (1 - alpha) + 1e-12).all()
        r_sorted = rel.r_v[rel.order]
        assert (np.diff(r_sorted) <= 0).all()
        active = select_active_set(rel, gamma, lam, g.n)
        assert active.size <= math.ceil(lam * g.n)
        assert (rel.metric[active] > gamma).all()


def _c2v(values):
    v2c = np.concatenate(([0.0], values))
    return c2v_rule(0, 0, v2c, np.array([0, v2c.size], dtype=np.int64))


def _suite_c2v(rng, count):
    for _ in range(count):
        vals = rng.normal(0, rng.uniform(0.1, 20), rng.integers(1, 9))
        vals = np.clip(vals, -L_MAX, L_MAX)
        vals[np.abs(vals) < 1e-6] = 1e-6
        out = _c2v(vals)
        assert np.sign(out) == np.prod(np.sign(vals))
        assert abs(out) <= np.abs(vals).min() + 1e-9


def _suite_syndrome(rng, g, count):
    for _ in range(count):
        a = rng.integers(0, 2, g.n, dtype=np.uint8)
        b = rng.integers(0, 2, g.n, dtype=np.uint8)
        assert np.array_equal(syndrome(g, a ^ b), syndrome(g, a) ^ syndrome(g, b))


def _suite_clamp(rng, g, count):
    extremes = np.array([L_MAX, -L_MAX, 0.0, 1e-300, -1e-300, 1e6, -1e6])
    for i in range(count):
        vals = rng.choice(extremes, rng.integers(1, 9))
        out = _c2v(np.clip(vals, -L_MAX, L_MAX))
        assert math.isfinite(out) and abs(out) <= L_MAX
        llrs = rng.choice(extremes, g.n) * (rng.random(g.n) < 0.5) + rng.normal(0, 3, g.n)
        res = decode(g, llrs, DecoderConfig(ALGORITHMS[i % len(ALGORITHMS)], t_max=3))
        assert np.isfinite(res.final_posterior).all() and np.abs(res.final_posterior).max() <= L_MAX
        AUDIT["decodes"] += 1
        AUDIT["unsound"] += res.converged and not is_codeword(g, res.decoded)


def _suite_collapse(rng, g, count):
    for _ in range(count):
        llrs = rng.normal(1.0, 1.8, g.n)
        ref = decode(g, llrs, DecoderConfig("rbp", t_max=4, early_stop=False))
        for variant in (DecoderConfig("rd_rbp", decay=1.0, t_max=4, early_stop=False),
                        DecoderConfig("list_rbp", list_size=1, t_max=4, early_stop=False)):
            got = decode(g, llrs, variant)
            assert np.array_equal(got.final_posterior, ref.final_posterior)
            assert np.array_equal(got.decisions, ref.decisions)


def test_criterion_5_property_suites(verdict):
    count = 1000
    g = construct_regular_code(CodeSpec(48, 24, 3, 6), 5)
    suites = {
        "reliability/active-set": lambda rng: _suite_reliability(rng, g, count),
        "c2v sign/magnitude": lambda rng: _suite_c2v(rng, count),
        "syndrome linearity": lambda rng: _suite_syndrome(rng, g, count),
        "clamp safety": lambda rng: _suite_clamp(rng, g, count),
        "rd_rbp(1)/list_rbp(1) == rbp": lambda rng: _suite_collapse(rng, g, count),
    }
    failed = []
    for i, (name, suite) in enumerate(suites.items()):
        try:
            suite(np.random.default_rng(100 + i))
        except AssertionError:
            failed.append(name)
    ok = not failed
    verdict(5, ok, f"{len(suites)} suites x {count} instances; failed: {failed or 'none'}")
    assert ok


# -- 6: worker-count invariance ----------------------------------------------------------------------


def test_criterion_6_worker_invariance(tmp_path, verdict):
    plan = ExperimentPlan(
        code=CodeSpec(512, 256, 3, 6), code_seed=1,
        decoders=(DecoderConfig("arcid"), DecoderConfig("rbp"), DecoderConfig("flooding")),
        snr_points_db=(1.5, 2.5, 3.0), max_codewords=300, max_error_events=40, master_seed=11,
    )
    blobs = {}
    for workers in (1, 2, 3):
        report = run_sweep(plan, workers=workers)
        _audit_report(report)
        path = tmp_path / f"w{workers}.csv"
        write_report_csv(report, path, meta=plan.describe())
        blobs[workers] = path.read_bytes()
    ok = blobs[1] == blobs[2] == blobs[3]
    verdict(6, ok, f"sweep CSV ({len(blobs[1])} bytes) identical for 1, 2 and 3 workers: {ok}")
    assert ok


# -- 7: converged flag soundness ---------------------------------------------------------------------


def test_criterion_7_convergence_soundness(verdict):
    g = construct_regular_code(CodeSpec(512, 256, 3, 6), 1)
    plan = ExperimentPlan(
        code=CodeSpec(512, 256, 3, 6), code_seed=1,
        decoders=tuple(DecoderConfig(a) for a in ALGORITHMS),
        snr_points_db=(0.5, 1.5), max_codewords=150, max_error_events=10**6, master_seed=5,
    )
    _audit_report(run_sweep(plan, graph=g))
    ok = AUDIT["unsound"] == 0
    verdict(7, ok, f"{AUDIT['unsound']} converged-but-invalid results in {AUDIT['decodes']} audited decodes")
    assert ok
