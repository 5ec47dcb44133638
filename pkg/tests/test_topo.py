"""Phase normalization, vorticity, potentials, helicity and boundary flux."""

import math

import numpy as np
import pytest

from emtopo import (
    MediumState,
    ModelParams,
    NormalizationRanges,
    analytic_potential,
    curl,
    dpsi_dt,
    equilibrium_state,
    fhn_rhs,
    gradient,
    helicity,
    helicity_flux,
    helicity_record,
    hopf_initial_condition,
    make_grid,
    normalize_uv,
    omega_field,
    phi_field,
    solenoidal_project,
    spectral_divergence,
    spectral_gradient,
    vector_potential_coulomb,
    volume_integral,
)
from emtopo.grid import BoundarySpec, FaceBC, ScalarField, VectorField3
from emtopo.topo import PhaseField, default_p_reg

from conftest import equilibrium_bc

SQRT2 = math.sqrt(2.0)

# with these ranges the scaling is simply U = u/sqrt2, V = v/sqrt2
UNIT_RANGES = NormalizationRanges(-1.0, 1.0, -1.0, 1.0)


def state_from(grid, u_vals, v_vals, t=0.0):
    return MediumState(ScalarField(grid, u_vals), ScalarField(grid, v_vals), t)


def uniform_state(grid, u, v):
    return MediumState(ScalarField.full(grid, u), ScalarField.full(grid, v), 0.0)


def l2(*arrays):
    return math.sqrt(sum(float(np.sum(a * a)) for a in arrays))


def vf_sub(a, b):
    return tuple(x - y for x, y in zip(a.arrays(), b.arrays()))


def test_normalize_range_endpoints():
    g = make_grid(1.0, 4)
    r = NormalizationRanges(0.0, 2.0, -1.0, 3.0)
    pf = normalize_uv(uniform_state(g, 2.0, 1.0), r)
    assert np.allclose(pf.U.values, 1.0 / SQRT2, atol=1e-15)
    assert np.allclose(pf.V.values, 0.0, atol=1e-15)  # midpoint of [-1, 3]
    assert pf.clamp_count == 0


def test_normalize_disk_bound_holds_in_range():
    g = make_grid(1.0, 12)
    rng = np.random.default_rng(11)
    u = rng.uniform(-1.0, 1.0, g.shape)
    v = rng.uniform(-1.0, 1.0, g.shape)
    pf = normalize_uv(state_from(g, u, v), UNIT_RANGES)
    assert np.all(pf.U.values**2 + pf.V.values**2 <= 1.0 + 1e-15)


def test_normalize_clamps_and_counts_outliers():
    g = make_grid(1.0, 3)
    u = np.zeros(g.shape)
    v = np.zeros(g.shape)
    u[0, 0, 0] = 5.0
    u[1, 1, 1] = -5.0
    v[2, 2, 2] = 9.0
    pf = normalize_uv(state_from(g, u, v), UNIT_RANGES)
    assert pf.clamp_count == 3
    assert int(pf.clamped_u.sum()) == 2
    assert int(pf.clamped_v.sum()) == 1
    assert pf.U.values[0, 0, 0] == pytest.approx(1.0 / SQRT2, abs=1e-15)
    assert pf.U.values[1, 1, 1] == pytest.approx(-1.0 / SQRT2, abs=1e-15)
    assert np.all(pf.U.values**2 + pf.V.values**2 <= 1.0 + 1e-15)


def test_normalize_preserves_level_sets_exactly():
    g = make_grid(1.0, 14)
    rng = np.random.default_rng(2)
    u = rng.uniform(-0.9, 0.9, g.shape)
    v = rng.uniform(-0.9, 0.9, g.shape)
    pf = normalize_uv(state_from(g, u, v), UNIT_RANGES)
    c = 0.033
    c_prime = (2.0 * (c - UNIT_RANGES.u_min) / (UNIT_RANGES.u_max - UNIT_RANGES.u_min) - 1.0) / SQRT2
    assert np.array_equal(u > c, pf.U.values > c_prime)


def test_phi_at_unit_modulus_is_zero():
    # h = 1 on the toy grid would put the default p_reg at 1; pin it small
    g = make_grid(1.0, 3)
    pf = normalize_uv(uniform_state(g, 1.0, 1.0), UNIT_RANGES, p_reg=1e-6)  # p = 1
    phi, mask = phi_field(pf)
    # p lands one ulp shy of 1, so |phi| ~ sqrt(eps) rather than exactly 0
    assert np.max(np.abs(phi)) < 1e-7
    assert not mask.any()


def test_phi_hand_values():
    g = make_grid(1.0, 3)
    # U = 1/2, V = 0 -> p = 1/2, q = 0 -> phi = 1
    pf = normalize_uv(uniform_state(g, SQRT2 / 2.0, 0.0), UNIT_RANGES, p_reg=1e-6)
    phi, _ = phi_field(pf)
    assert np.allclose(phi, 1.0 + 0.0j, atol=1e-14)
    # U = 0, V = 1/sqrt2 -> p = 1/sqrt2, q = pi/2 -> phi = i sqrt(sqrt2 - 1)
    pf = normalize_uv(uniform_state(g, 0.0, 1.0), UNIT_RANGES, p_reg=1e-6)
    phi, _ = phi_field(pf)
    expect = 1j * math.sqrt(SQRT2 - 1.0)
    assert np.allclose(phi, expect, atol=1e-14)


def test_omega_zero_for_uniform_phase():
    g = make_grid(1.0, 6)
    pf = normalize_uv(uniform_state(g, 0.3, -0.2), UNIT_RANGES)
    om = omega_field(pf)
    assert all(np.all(c == 0.0) for c in om.arrays())


def test_omega_matches_analytic_line_vortex():
    # U = x/4, V = y/4: gradients are exact for linear fields, so off the
    # z-axis Omega equals z_hat/(8 pi sqrt(x^2+y^2)) to round-off
    g = make_grid(1.0, 17)
    x, y, z = g.meshgrid()
    pf = normalize_uv(state_from(g, SQRT2 * x / 4.0, SQRT2 * y / 4.0), UNIT_RANGES)
    om = omega_field(pf)
    r = np.sqrt(x**2 + y**2)
    sel = r > 0.3
    expect = 1.0 / (8.0 * np.pi * r[sel])
    assert np.allclose(om.z.values[sel], expect, rtol=1e-12)
    assert np.max(np.abs(om.x.values[sel])) < 1e-12
    assert np.max(np.abs(om.y.values[sel])) < 1e-12


def smooth_phase_state(grid):
    x, y, z = grid.meshgrid()
    L = grid.L
    u = SQRT2 * (0.45 + 0.15 * np.sin(2 * np.pi * x / L) * np.cos(2 * np.pi * y / L))
    v = SQRT2 * (0.35 + 0.15 * np.cos(2 * np.pi * z / L))
    return state_from(grid, u, v)


def test_omega_agrees_with_phi_route():
    # both forms evaluated from the same per-node (U, V, grad U, grad V)
    # data; the phi gradients follow by the chain rule, so any difference
    # is algebra, not discretization
    g = make_grid(1.0, 20, ("periodic",) * 3)
    pf = normalize_uv(smooth_phase_state(g), UNIT_RANGES)
    om = omega_field(pf)

    U = pf.U.values
    V = pf.V.values
    p = pf.p
    q = np.arctan2(V, U)
    m = np.sqrt((1.0 - p) / p)
    gU = gradient(pf.U).arrays()
    gV = gradient(pf.V).arrays()
    grad_p = tuple((U * a + V * b) / p for a, b in zip(gU, gV))
    grad_q = tuple((U * b - V * a) / p**2 for a, b in zip(gU, gV))
    dm_dp = -1.0 / (2.0 * m * p**2)
    eiq = np.exp(1j * q)
    grad_phi = tuple(eiq * (dm_dp * dp + 1j * m * dq) for dp, dq in zip(grad_p, grad_q))
    grad_phib = tuple(np.conj(c) for c in grad_phi)
    denom = 2.0 * np.pi * 1j * (1.0 + m * m) ** 2
    ox = (grad_phi[1] * grad_phib[2] - grad_phi[2] * grad_phib[1]) / denom
    oy = (grad_phi[2] * grad_phib[0] - grad_phi[0] * grad_phib[2]) / denom
    oz = (grad_phi[0] * grad_phib[1] - grad_phi[1] * grad_phib[0]) / denom

    scale = max(np.max(np.abs(c)) for c in om.arrays())
    for direct, reduced in zip((ox, oy, oz), om.arrays()):
        assert np.max(np.abs(direct.imag)) < 1e-12 * scale
        assert np.max(np.abs(direct.real - reduced)) < 1e-6 * scale


def test_omega_divergence_refines_at_second_order():
    from emtopo import divergence

    errs = []
    for n in (24, 48):
        g = make_grid(1.0, n, ("periodic",) * 3)
        pf = normalize_uv(smooth_phase_state(g), UNIT_RANGES)
        om = omega_field(pf)
        div = divergence(om, BoundarySpec.all_periodic())
        errs.append(l2(div.values) / l2(*om.arrays()))
    ratio = errs[0] / errs[1]
    assert 2.5 < ratio < 6.0


def test_coulomb_potential_of_zero_is_zero():
    g = make_grid(1.0, 8, ("periodic",) * 3)
    zero = VectorField3.from_arrays(g, *(np.zeros(g.shape),) * 3)
    psi = vector_potential_coulomb(zero)
    assert all(np.all(c == 0.0) for c in psi.arrays())


def test_coulomb_potential_single_mode_analytic():
    L = np.pi
    g = make_grid(L, 32, ("periodic",) * 3)
    x, y, z = g.meshgrid()
    om = VectorField3.from_arrays(g, np.zeros(g.shape), np.zeros(g.shape), np.sin(x))
    psi = vector_potential_coulomb(om)
    expect_y = -np.cos(x)
    err = l2(psi.x.values, psi.y.values - expect_y, psi.z.values)
    assert err / l2(expect_y) < 1e-10


def random_band_limited(grid, seed, kmax=2):
    """Real periodic field from a few low modes, reproducible."""
    rng = np.random.default_rng(seed)
    x, y, z = grid.meshgrid()
    f = np.zeros(grid.shape)
    tl = np.pi / grid.L
    for _ in range(6):
        k = rng.integers(-kmax, kmax + 1, size=3)
        if not k.any():
            continue
        amp = rng.uniform(-1.0, 1.0)
        ph = rng.uniform(0.0, 2.0 * np.pi)
        f += amp * np.cos(tl * (k[0] * x + k[1] * y + k[2] * z) + ph)
    return f


def test_coulomb_potential_curl_recovers_omega():
    g = make_grid(1.0, 64, ("periodic",) * 3)
    w = VectorField3.from_arrays(
        g,
        random_band_limited(g, 101),
        random_band_limited(g, 102),
        random_band_limited(g, 103),
    )
    om = solenoidal_project(w)
    psi = vector_potential_coulomb(om)
    c = curl(psi, BoundarySpec.all_periodic())
    err = l2(*vf_sub(c, om)) / l2(*om.arrays())
    assert err < 1e-2


def test_coulomb_potential_is_divergence_free():
    g = make_grid(1.0, 32, ("periodic",) * 3)
    w = VectorField3.from_arrays(
        g,
        random_band_limited(g, 7),
        random_band_limited(g, 8),
        random_band_limited(g, 9),
    )
    psi = vector_potential_coulomb(w)
    div = spectral_divergence(psi)
    scale = max(np.max(np.abs(c)) for c in psi.arrays())
    assert np.max(np.abs(div.values)) < 1e-10 * scale


def test_helicity_zero_when_either_factor_vanishes():
    g = make_grid(1.0, 8, ("periodic",) * 3)
    zero = VectorField3.from_arrays(g, *(np.zeros(g.shape),) * 3)
    w = VectorField3.from_arrays(g, *(np.ones(g.shape),) * 3)
    assert helicity(zero, w) == 0.0
    assert helicity(w, zero) == 0.0


def test_helicity_zero_for_uniform_equilibrium():
    g = make_grid(5.0, 16, ("periodic",) * 3)
    p = ModelParams()
    s = uniform_state(g, *equilibrium_state(p))
    rec = helicity_record(s, p, BoundarySpec.all_periodic(), NormalizationRanges.from_state(s))
    assert rec.H == 0.0
    assert rec.flux_total == 0.0


def hopf_periodic_record(n):
    g = make_grid(5.0, n, ("periodic",) * 3)
    s = hopf_initial_condition(g)
    return helicity_record(s, ModelParams(), BoundarySpec.all_periodic(), NormalizationRanges.from_state(s))


def test_helicity_regression_value_at_64():
    rec = hopf_periodic_record(64)
    assert rec.H == pytest.approx(-0.1975, abs=2e-3)


def test_helicity_stable_across_resolutions():
    # sign and magnitude stability (within 10% of the finest grid) of the
    # initial-state helicity across 48/64/96
    values = {n: hopf_periodic_record(n).H for n in (48, 64, 96)}
    print("helicity by resolution:", {n: "%.4f" % h for n, h in values.items()})
    signs = {np.sign(h) for h in values.values()}
    assert len(signs) == 1
    ref = values[96]
    for n in (48, 64):
        assert abs(values[n] - ref) <= 0.10 * abs(ref), (
            "helicity at %d^3 deviates %.1f%% from the 96^3 value"
            % (n, 100.0 * abs(values[n] - ref) / abs(ref))
        )


def test_helicity_gauge_invariance_periodic():
    g = make_grid(5.0, 48, ("periodic",) * 3)
    s = hopf_initial_condition(g)
    pf = normalize_uv(s, NormalizationRanges.from_state(s))
    om = solenoidal_project(omega_field(pf))
    psi = vector_potential_coulomb(om)
    H0 = helicity(psi, om)
    chi = ScalarField(g, 0.3 * random_band_limited(g, 55))
    gchi = spectral_gradient(chi)
    shifted = VectorField3.from_arrays(
        g, *(a + b for a, b in zip(psi.arrays(), gchi.arrays()))
    )
    H1 = helicity(shifted, om)
    assert abs(H1 - H0) <= 1e-8 * abs(H0)


def test_analytic_potential_zero_on_unit_modulus():
    # p = 1 with spatially varying phase: the (p - 1) factor kills the field
    g = make_grid(1.0, 10, ("periodic",) * 3)
    x, _, _ = g.meshgrid()
    alpha = 2.0 * np.pi * x / g.L
    U = ScalarField(g, np.cos(alpha) / 1.0)
    V = ScalarField(g, np.sin(alpha) / 1.0)
    p = np.sqrt(U.values**2 + V.values**2)
    pf = PhaseField(
        U, V, p, default_p_reg(g), p < default_p_reg(g), 0,
        np.zeros(g.shape, bool), np.zeros(g.shape, bool), UNIT_RANGES,
    )
    psia = analytic_potential(pf)
    assert max(np.max(np.abs(c)) for c in psia.arrays()) < 1e-12


def test_analytic_potential_zero_for_uniform_phase():
    g = make_grid(1.0, 6)
    pf = normalize_uv(uniform_state(g, 0.2, 0.4), UNIT_RANGES)
    psia = analytic_potential(pf)
    assert all(np.all(c == 0.0) for c in psia.arrays())


def dilate_mask(mask, radius):
    """Chebyshev-ball dilation by whole-node offsets within a Euclidean radius."""
    out = np.zeros_like(mask)
    r = int(radius)
    for dx in range(-r, r + 1):
        for dy in range(-r, r + 1):
            for dz in range(-r, r + 1):
                if dx * dx + dy * dy + dz * dz > radius * radius:
                    continue
                out |= np.roll(mask, (dx, dy, dz), axis=(0, 1, 2))
    return out


def test_analytic_potential_curl_matches_omega_on_hopf_state():
    # self-consistency of the closed-form potential on the production
    # initial state at 64^3, off-mask with 2h exclusion tubes
    g = make_grid(5.0, 64)
    s = hopf_initial_condition(g)
    pf = normalize_uv(s, NormalizationRanges.from_state(s))
    om = omega_field(pf)
    c = curl(analytic_potential(pf))
    keep = ~dilate_mask(pf.singular_mask, 2)
    diff = vf_sub(c, om)
    err = l2(*(d[keep] for d in diff)) / l2(*(a[keep] for a in om.arrays()))
    print("curl consistency off-mask rel error: %.4f" % err)
    assert err < 1e-2


def test_analytic_potential_curl_error_in_resolved_regions():
    # diagnostic: the same comparison restricted to well-resolved modulus
    # bands, printed for the record (the filament annulus dominates the
    # plain off-mask norm)
    g = make_grid(5.0, 64)
    s = hopf_initial_condition(g)
    pf = normalize_uv(s, NormalizationRanges.from_state(s))
    om = omega_field(pf)
    c = curl(analytic_potential(pf))
    diff = vf_sub(c, om)
    for cut in (0.05, 0.1, 0.2):
        keep = pf.p >= cut
        err = l2(*(d[keep] for d in diff)) / l2(*(a[keep] for a in om.arrays()))
        print("p >= %.2f: rel curl error %.4f over %d nodes" % (cut, err, keep.sum()))
        assert np.isfinite(err)


def test_dpsi_dt_zero_rates_give_zero_field():
    g = make_grid(1.0, 10)
    pf = normalize_uv(smooth_phase_state(g), UNIT_RANGES)
    zero = ScalarField.full(g, 0.0)
    d = dpsi_dt(pf, zero, zero)
    assert all(np.all(c == 0.0) for c in d.arrays())


def test_dpsi_dt_vanishes_on_pinned_walls():
    g = make_grid(5.0, 20)
    p = ModelParams()
    bc = equilibrium_bc(p)
    s = hopf_initial_condition(g)
    from emtopo import pin_boundary

    s = pin_boundary(s, bc)
    pf = normalize_uv(s, NormalizationRanges.from_state(s))
    du, dv = fhn_rhs(s, p, bc)
    d = dpsi_dt(pf, du, dv)
    for arr in d.arrays():
        assert np.all(arr[0] == 0.0) and np.all(arr[-1] == 0.0)
        assert np.all(arr[:, 0] == 0.0) and np.all(arr[:, -1] == 0.0)
        assert np.all(arr[:, :, 0] == 0.0) and np.all(arr[:, :, -1] == 0.0)


def test_dpsi_dt_agrees_with_phi_route():
    g = make_grid(1.0, 16, ("periodic",) * 3)
    s = smooth_phase_state(g)
    pf = normalize_uv(s, UNIT_RANGES)
    x, y, z = g.meshgrid()
    du = ScalarField(g, 0.2 * np.cos(2 * np.pi * y / g.L))
    dv = ScalarField(g, -0.1 + 0.05 * np.sin(2 * np.pi * x / g.L))
    d = dpsi_dt(pf, du, dv)

    U = pf.U.values
    V = pf.V.values
    p = pf.p
    q = np.arctan2(V, U)
    m = np.sqrt((1.0 - p) / p)
    # same linear scaling as normalize_uv, applied to the rates
    dU = du.values / SQRT2
    dV = dv.values / SQRT2
    dp = (U * dU + V * dV) / p
    dq = (U * dV - V * dU) / p**2
    gU = gradient(pf.U).arrays()
    gV = gradient(pf.V).arrays()
    grad_p = tuple((U * a + V * b) / p for a, b in zip(gU, gV))
    grad_q = tuple((U * b - V * a) / p**2 for a, b in zip(gU, gV))
    dm_dp = -1.0 / (2.0 * m * p**2)
    eiq = np.exp(1j * q)
    dphi = eiq * (dm_dp * dp + 1j * m * dq)
    grad_phi = tuple(eiq * (dm_dp * a + 1j * m * b) for a, b in zip(grad_p, grad_q))
    denom = 2.0 * np.pi * 1j * (1.0 + m * m) ** 2
    expect = tuple(
        -(np.conj(dphi) * gp - dphi * np.conj(gp)) / denom for gp in grad_phi
    )
    scale = max(np.max(np.abs(c)) for c in d.arrays())
    for direct, reduced in zip(expect, d.arrays()):
        assert np.max(np.abs(direct.imag)) < 1e-12 * scale
        assert np.max(np.abs(direct.real - reduced)) < 1e-6 * scale


def test_dpsi_dt_differs_from_potential_rate_by_pure_gradient():
    # rotating phase with spatially constant angle: the closed-form
    # potential is time-independent, so dpsi must be a discrete gradient
    # and its curl cancels exactly on a periodic grid
    g = make_grid(1.0, 16, ("periodic",) * 3)
    x, _, _ = g.meshgrid()
    gx = 0.5 + 0.2 * np.sin(2 * np.pi * x / g.L)
    omega_rate = 0.7
    s = state_from(g, SQRT2 * gx, np.zeros(g.shape))
    pf = normalize_uv(s, UNIT_RANGES)
    du = ScalarField.full(g, 0.0)
    dv = ScalarField(g, SQRT2 * omega_rate * gx)
    d = dpsi_dt(pf, du, dv)
    c = curl(d, BoundarySpec.all_periodic())
    assert max(np.max(np.abs(a)) for a in c.arrays()) < 1e-6


def fhn_flux_record(axis_kinds, n=16):
    kinds = []
    for k in axis_kinds:
        kinds.append("periodic" if k == "periodic" else "nonperiodic")
    g = make_grid(5.0, n, tuple(kinds))
    p = ModelParams()
    u_eq, v_eq = equilibrium_state(p)
    faces = []
    for k in axis_kinds:
        if k == "dirichlet":
            faces.extend([FaceBC("dirichlet", {"u": u_eq, "v": v_eq})] * 2)
        else:
            faces.extend([FaceBC(k)] * 2)
    bc = BoundarySpec(tuple(faces))
    s = hopf_initial_condition(g)
    from emtopo import pin_boundary

    s = pin_boundary(s, bc)
    return helicity_record(s, p, bc, NormalizationRanges.from_state(s))


def test_flux_zero_on_fully_pinned_walls():
    rec = fhn_flux_record(("dirichlet",) * 3)
    assert rec.flux_faces == (0.0,) * 6
    assert rec.flux_total == 0.0


def test_flux_periodic_pairs_report_zero():
    rec = fhn_flux_record(("neumann", "neumann", "periodic"))
    assert rec.flux_faces[4] == 0.0 and rec.flux_faces[5] == 0.0


def test_flux_neumann_faces_carry_the_loss():
    rec = fhn_flux_record(("neumann", "neumann", "periodic"))
    assert any(f != 0.0 for f in rec.flux_faces[:4])
    assert rec.flux_faces[4:] == (0.0, 0.0)


def test_flux_faces_sum_to_total():
    rec = fhn_flux_record(("neumann", "dirichlet", "periodic"))
    assert rec.flux_total == pytest.approx(sum(rec.flux_faces), abs=1e-15)
