import dataclasses

import numpy as np
import pytest

from isac_subspace import IsacError, Scenario, draw_rayleigh_channel, export_sdp, fim_single, parse_sdpa, solve_closed_form
from isac_subspace.sdp import build_sdp, candidate_point, covariance_basis, pack_covariance


@pytest.fixture
def small():
    scn = dataclasses.replace(Scenario(), n_t=4, n_r=4, T=8)
    ch = draw_rayleigh_channel(1, 4, normalize=True)
    return scn, ch, 0.5 * scn.P


def test_header_layout(small):
    scn, ch, Gamma = small
    prob = build_sdp(scn, ch, Gamma)
    assert prob.block_sizes == [4, 4, 4, 8, 1, 1, 1]
    assert prob.num_vars == 16 + 3
    np.testing.assert_array_equal(prob.c, [0.0] * 16 + [1.0] * 3)


def test_round_trip(small, tmp_path):
    scn, ch, Gamma = small
    path = tmp_path / "p.dat-s"
    prob = export_sdp(scn, ch, Gamma, path)
    text = path.read_text()
    back = parse_sdpa(text)
    assert back.block_sizes == prob.block_sizes
    assert back.body() == prob.body()
    assert back.to_text() == text


def test_pack_covariance_inverts_basis():
    rng = np.random.default_rng(0)
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    R = G @ G.conj().T
    x = pack_covariance(R)
    rebuilt = sum(v * E for v, E in zip(x, covariance_basis(4)))
    np.testing.assert_allclose(rebuilt, R, atol=1e-12)


def test_closed_form_point_is_feasible(small):
    scn, ch, Gamma = small
    prob = build_sdp(scn, ch, Gamma)
    sol = solve_closed_form(scn, ch, Gamma)
    F = fim_single(scn, sol.R).F
    x = candidate_point(prob, sol.R, F)
    for blk in prob.block_matrices(x):
        assert np.linalg.eigvalsh(blk).min() >= -1e-9 * max(1.0, np.abs(blk).max())
    # objective is the CRB trace up to the slack
    assert prob.c @ x == pytest.approx(np.trace(np.linalg.inv(F)), rel=1e-8)


def test_infeasible_point_detected(small):
    scn, ch, Gamma = small
    prob = build_sdp(scn, ch, Gamma)
    sol = solve_closed_form(scn, ch, Gamma)
    F = fim_single(scn, sol.R).F
    x = candidate_point(prob, 1.2 * sol.R, F)
    assert min(np.linalg.eigvalsh(b).min() for b in prob.block_matrices(x)) < -1e-6


def test_floats_use_17_digits(small):
    scn, ch, Gamma = small
    body = build_sdp(scn, ch, Gamma).body()
    vals = [float(line.split()[-1]) for line in body.splitlines()[4:]]
    assert all(("%.17g" % v) in body for v in vals[:20])


def test_truncated_file_rejected():
    with pytest.raises(IsacError):
        parse_sdpa("3\n1\n")


def test_unwritable_path(small, tmp_path):
    scn, ch, Gamma = small
    with pytest.raises(IsacError):
        export_sdp(scn, ch, Gamma, tmp_path / "missing" / "p.dat-s")
