import math
from dataclasses import replace

import numpy as np
import pytest

from hdajscc.params import SystemParams
from hdajscc.simulator import (
    RunReport,
    SweepFailure,
    cross_term_stats,
    run,
    simulate_trials,
    summarize,
    sweep,
)

BASE = SystemParams(1.0, 1.0, 1.0, 0.25, 32, delta=0.05, seed=123)


def test_uncoded_matches_closed_form():
    rep = run(replace(BASE, n=64), 20_000, "uncoded")
    assert rep.M == 1 and rep.params["rho"] == 0.0
    assert abs(rep.mean_distortion - 0.5) <= 3 * rep.stderr
    assert abs(rep.mean_power - 1.0) <= 3 * rep.power_stderr
    assert rep.encode_failure_rate == 0.0 and rep.decode_error_rate == 0.0


def test_uncoded_ignores_params_rho():
    a = run(BASE, 1000, "uncoded")
    b = run(replace(BASE, rho=0.1), 1000, "uncoded")
    assert a == b


def test_sweep_rho_zero_equals_uncoded_run():
    [pt] = sweep(BASE, [0.0], [BASE.n], 1500, "full")
    un = run(BASE, 1500, "uncoded")
    assert replace(pt, mode="uncoded") == un


def test_report_fields_and_stderr():
    trials = simulate_trials(BASE, 700, "full")
    rep = summarize(BASE, trials, "full", "fixed")
    assert rep.num_trials == len(trials) == 700
    assert rep.stderr == pytest.approx(np.std(trials.sq_error, ddof=1) / math.sqrt(700), rel=1e-12)
    assert rep.ci_low < rep.mean_distortion < rep.ci_high
    for rate in (rep.encode_failure_rate, rep.decode_error_rate):
        assert 0.0 <= rate <= 1.0
    assert np.all(trials.sq_error >= 0) and np.all(trials.block_power >= 0) and np.all(trials.quant_error >= 0)
    assert rep.theory["D_star"] == 0.5 and rep.theory["C"] == 0.5


def test_genie_mode_bypasses_decoder():
    rep = run(BASE, 600, "genie")
    assert rep.decode_error_rate is None and rep.mean_inner_zu is None
    assert rep.mean_distortion == rep.genie_mean_distortion


def test_full_mode_genie_column_matches_genie_run():
    full = run(BASE, 600, "full")
    genie = run(BASE, 600, "genie")
    assert full.genie_mean_distortion == genie.mean_distortion


def test_determinism_independent_of_workers():
    a = run(BASE, 1300, "full", workers=1)
    b = run(BASE, 1300, "full", workers=4)
    assert a == b


def test_trial_prefix_stability():
    # chunked streams: the first trials do not depend on the total count
    a = simulate_trials(BASE, 300, "full")
    b = simulate_trials(BASE, 900, "full")
    assert np.array_equal(a.sq_error, b.sq_error[:300])


def test_seed_changes_results():
    assert run(BASE, 300, "full").mean_distortion != run(replace(BASE, seed=124), 300, "full").mean_distortion


def test_fresh_per_trial_policy():
    p = replace(BASE, n=16)
    a = run(p, 300, "full", "fresh_per_trial")
    b = run(p, 300, "full", "fresh_per_trial", workers=3)
    assert a == b
    assert a.codebook_policy == "fresh_per_trial"
    assert a.mean_distortion != run(p, 300, "full", "fixed").mean_distortion


def test_cross_terms_zero_rate():
    trials = simulate_trials(replace(BASE, rho=0.0), 500, "full")
    ct = cross_term_stats(trials, replace(BASE, rho=0.0))
    assert ct.inner_su_mean == 0.0 and ct.inner_zu_mean == 0.0


def test_near_capacity_warning():
    C = 0.5
    rep = run(replace(BASE, rho=C * (1 - 1e-8), n=2), 10, "genie")
    assert rep.theory["alpha"] ** 2 < 1e-6
    assert any("numerical margin" in w for w in rep.warnings)
    assert not run(BASE, 10, "genie").warnings


def test_sweep_collects_errors_and_orders_rho_major():
    out = sweep(BASE, [0.1, 0.7, 0.25], [8, 16], 50, "genie")
    assert len(out) == 6
    keys = [(o.rho, o.n) if isinstance(o, SweepFailure) else (o.params["rho"], o.params["n"]) for o in out]
    assert keys == [(0.1, 8), (0.1, 16), (0.7, 8), (0.7, 16), (0.25, 8), (0.25, 16)]
    assert isinstance(out[2], SweepFailure) and "capacity" in out[2].error
    assert all(isinstance(o, RunReport) for i, o in enumerate(out) if i not in (2, 3))


def test_sweep_point_equals_run():
    [pt] = sweep(BASE, [0.25], [16], 400, "full")
    assert pt == run(replace(BASE, n=16), 400, "full")


def test_full_never_beats_genie_on_average():
    for n in (16, 32):
        rep = run(replace(BASE, n=n), 3000, "full")
        assert rep.mean_distortion >= rep.genie_mean_distortion


def test_coded_power_within_budget():
    # one-sided budget E||x||^2/n <= P; see ledger for the finite-n shortfall
    for n in (16, 32, 48):
        rep = run(replace(BASE, n=n), 3000, "full")
        assert rep.mean_power <= 1.0 + 3 * rep.power_stderr


@pytest.mark.parametrize("bad", [dict(num_trials=0), dict(mode="x"), dict(codebook_policy="y")])
def test_run_argument_validation(bad):
    kw = dict(num_trials=10, mode="full", codebook_policy="fixed")
    kw.update(bad)
    with pytest.raises(ValueError):
        run(BASE, **kw)
