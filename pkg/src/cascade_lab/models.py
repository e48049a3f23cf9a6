"""Source models: driven two-level systems with and without filter cavities.

All builders return a :class:`~cascade_lab.liouville.Liouvillian` whose two
ports are the operators emitted into the waveguides that feed target qubits 1
and 2, or a :class:`~cascade_lab.gaussian.QuadraticModel` for the eliminated
cavity dynamics. Unless stated otherwise, the frame rotates at the drive
frequency, so qubit probe detunings are measured from the drive.

Frequencies and rates are plain floats in any consistent unit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .gaussian import QuadraticModel
from .liouville import Liouvillian, Port, laplace_correlation
from .operators import DimensionError, HilbertSpace, Operator, destroy, embed, pauli

MAX_SUPEROP_DIM = 4_000_000


class MemoryGuardError(DimensionError):
    """Requested truncation would exceed the superoperator size cap."""


class BranchError(ValueError):
    """Bogoliubov quantities are only real for theta <= pi/2."""


@dataclass(frozen=True)
class TlsParams:
    """Driven two-level source.

    ``delta0`` is the emitter-drive detuning, ``omega0`` the Rabi frequency,
    ``gamma0`` decay into unmonitored channels, ``kappa`` decay into each of
    the two waveguides and ``gamma_phi`` pure dephasing.
    """

    delta0: float = 0.0
    omega0: float = 0.0
    gamma0: float = 0.0
    kappa: float = 1.0
    gamma_phi: float = 0.0

    def __post_init__(self):
        if self.omega0 < 0:
            raise ValueError("omega0 must be non-negative")
        for name in ("gamma0", "kappa", "gamma_phi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def from_dressed(cls, omega_tilde: float, theta: float, **kw) -> "TlsParams":
        """Parametrize by dressed splitting and mixing angle."""
        return cls(delta0=omega_tilde * np.cos(theta), omega0=omega_tilde * np.sin(theta), **kw)

    @property
    def gamma_total(self) -> float:
        return self.gamma0 + 2.0 * self.kappa

    @property
    def omega_tilde(self) -> float:
        return float(np.hypot(self.delta0, self.omega0))

    @property
    def theta(self) -> float:
        return float(np.arctan2(self.omega0, self.delta0))


@dataclass(frozen=True)
class CavityParams:
    """TLS coupled to two filter cavities at ``+delta_c`` and ``-delta_c``.

    ``tls.kappa`` is the cavity decay rate into its waveguide; the emitter
    itself only decays at ``tls.gamma0``.
    """

    tls: TlsParams
    g: float = 0.0
    delta_c: float = 0.0
    n_fock: int = 3

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("g must be non-negative")
        if self.n_fock < 2:
            raise DimensionError("n_fock must be at least 2")

    @property
    def kappa(self) -> float:
        return self.tls.kappa

    @property
    def g_c(self) -> float:
        return self.g * np.cos(self.tls.theta / 2) ** 2

    @property
    def g_s(self) -> float:
        return self.g * np.sin(self.tls.theta / 2) ** 2

    @property
    def g_B(self) -> float:
        c = np.cos(self.tls.theta)
        if c < -1e-12:
            raise BranchError(f"theta = {self.tls.theta:.6g} > pi/2 has no real g_B")
        # cos(pi/2) is 6e-17 in floating point; treat it as the exact null
        return self.g * np.sqrt(c) if c > 1e-12 else 0.0

    def with_fock(self, n: int) -> "CavityParams":
        return replace(self, n_fock=int(n))


@dataclass(frozen=True)
class DressedRates:
    gamma_z: float
    gamma_plus: float
    gamma_minus: float
    gamma_perp: float
    delta_z: float


@dataclass(frozen=True)
class PurcellRates:
    kappa1: float
    kappa2: float


# --- bare emitter ------------------------------------------------------------


def bare_tls(p: TlsParams) -> Liouvillian:
    """Driven TLS decaying symmetrically into two waveguides."""
    sm, sz, sx = pauli("minus"), pauli("z"), pauli("x")
    H = 0.5 * p.delta0 * sz + 0.5 * p.omega0 * sx
    collapse = [(sm, p.gamma_total), (sz, 0.5 * p.gamma_phi)]
    ports = [Port(sm, p.kappa), Port(sm, p.kappa)]
    return Liouvillian.build(H, collapse, ports=ports, frame="drive",
                             meta={"model": "bare-tls", "params": p})


def dressed_rates(p: TlsParams, delta_c: float = 0.0) -> DressedRates:
    th = p.theta
    gz = p.gamma0 * np.sin(th) ** 2 / 4.0
    gp = p.gamma0 * np.sin(th / 2) ** 4
    gm = p.gamma0 * np.cos(th / 2) ** 4
    return DressedRates(gz, gp, gm, 2.0 * gz + 0.5 * (gp + gm), p.omega_tilde - delta_c)


def dressed_transform(p: TlsParams, delta_c: float = 0.0) -> tuple[Operator, DressedRates]:
    """Rotation ``U`` with dressed states as columns, and the dressed rates.

    ``U[:, 0] = |g~> = cos(theta/2)|g> - sin(theta/2)|e>`` and
    ``U[:, 1] = |e~> = sin(theta/2)|g> + cos(theta/2)|e>``, so that
    ``U^dag H U = omega_tilde tau_z / 2``.
    """
    c, s = np.cos(p.theta / 2), np.sin(p.theta / 2)
    U = Operator(np.array([[c, s], [-s, c]], dtype=complex))
    return U, dressed_rates(p, delta_c)


# --- cavity models -----------------------------------------------------------


def _cavity_space(p: CavityParams) -> HilbertSpace:
    space = HilbertSpace((2, p.n_fock, p.n_fock))
    if space.size ** 2 > MAX_SUPEROP_DIM:
        raise MemoryGuardError(
            f"n_fock={p.n_fock} gives a {space.size ** 2}-dimensional superoperator "
            f"(cap {MAX_SUPEROP_DIM}); lower n_fock or raise MAX_SUPEROP_DIM")
    return space


def tls_two_cavities(p: CavityParams) -> Liouvillian:
    """Driven TLS with Jaynes-Cummings coupling to two detuned cavities."""
    space = _cavity_space(p)
    t = p.tls
    sm = embed(pauli("minus"), space, 0)
    sz = embed(pauli("z"), space, 0)
    sx = embed(pauli("x"), space, 0)
    a1 = embed(destroy(p.n_fock), space, 1)
    a2 = embed(destroy(p.n_fock), space, 2)
    H = (0.5 * t.delta0 * sz + 0.5 * t.omega0 * sx
         + p.delta_c * (a1.dag() @ a1 - a2.dag() @ a2))
    for a in (a1, a2):
        V = a @ sm.dag()
        H = H + p.g * (V + V.dag())
    collapse = [(sm, t.gamma0), (sz, 0.5 * t.gamma_phi), (a1, t.kappa), (a2, t.kappa)]
    ports = [Port(a1, t.kappa), Port(a2, t.kappa)]
    return Liouvillian.build(H, collapse, ports=ports, frame="drive",
                             meta={"model": "full-cavity", "params": p})


def bogoliubov_coefficients(p: CavityParams) -> tuple[float, float]:
    """``(cosh r, sinh r) = (g_c, g_s) / g_B``."""
    gB = p.g_B
    if gB == 0:
        raise BranchError("g_B vanishes at theta = pi/2; Bogoliubov modes undefined")
    return p.g_c / gB, p.g_s / gB


def dressed_rwa(p: CavityParams, frame: str = "drive", basis: str = "cavity") -> Liouvillian:
    """Dressed-state model with counter-rotating couplings dropped.

    Parameters
    ----------
    frame : {"drive", "cavity"}
        ``"cavity"`` additionally rotates at ``delta_c`` (cavities and dressed
        emitter together), leaving ``(omega_tilde - delta_c) tau_z / 2``. The
        ports then carry frequency offsets ``+delta_c`` and ``-delta_c``.
    basis : {"cavity", "bogoliubov"}
        Fock basis of ``a1, a2`` or of the Bogoliubov modes ``b1, b2`` with
        ``a1 = C b1 + S b2^dag`` and ``a2 = C b2 + S b1^dag``; the emitter
        then couples to ``b1`` only.
    """
    if frame not in ("drive", "cavity"):
        raise ValueError(f"unknown frame {frame!r}")
    if basis not in ("cavity", "bogoliubov"):
        raise ValueError(f"unknown basis {basis!r}")
    space = _cavity_space(p)
    t = p.tls
    rates = dressed_rates(t, p.delta_c)
    tm = embed(pauli("minus"), space, 0)
    tz = embed(pauli("z"), space, 0)
    m1 = embed(destroy(p.n_fock), space, 1)
    m2 = embed(destroy(p.n_fock), space, 2)
    if basis == "cavity":
        a1, a2 = m1, m2
        V = (p.g_c * a1.dag() - p.g_s * a2) @ tm
    else:
        C, S = bogoliubov_coefficients(p)
        a1 = C * m1 + S * m2.dag()
        a2 = C * m2 + S * m1.dag()
        V = p.g_B * (m1.dag() @ tm)
    # a1^dag a1 - a2^dag a2 = b1^dag b1 - b2^dag b2 holds exactly before truncation
    n_diff = m1.dag() @ m1 - m2.dag() @ m2
    if frame == "drive":
        H = 0.5 * t.omega_tilde * tz + p.delta_c * n_diff
        freqs = (0.0, 0.0)
    else:
        H = 0.5 * rates.delta_z * tz
        freqs = (p.delta_c, -p.delta_c)
    H = H + V + V.dag()
    collapse = [(a1, t.kappa), (a2, t.kappa), (tz, rates.gamma_z),
                (tm.dag(), rates.gamma_plus), (tm, rates.gamma_minus)]
    ports = [Port(a1, t.kappa, freqs[0]), Port(a2, t.kappa, freqs[1])]
    return Liouvillian.build(H, collapse, ports=ports, frame=frame,
                             meta={"model": "dressed-rwa", "basis": basis, "params": p})


def purcell_rates(p: CavityParams) -> PurcellRates:
    wt, k = p.tls.omega_tilde, p.kappa
    k1 = p.g_c ** 2 * k / ((p.delta_c - wt) ** 2 + (k / 2) ** 2)
    k2 = p.g_s ** 2 * k / ((-p.delta_c + wt) ** 2 + (k / 2) ** 2)
    return PurcellRates(float(k1), float(k2))


def resolved_purcell(p: CavityParams) -> Liouvillian:
    """Dressed emitter whose sidebands decay through the filter cavities.

    Port 1 emits through the dressed lowering operator, port 2 through the
    dressed raising operator. Port operators carry the unit-modulus phase of
    the cavity filter response so that the pair phase matches the cavity
    models. Non-zero ``gamma0`` adds the dressed incoherent rates.
    """
    t = p.tls
    r = purcell_rates(p)
    rates = dressed_rates(t, p.delta_c)
    tm, tz = pauli("minus"), pauli("z")
    tp = tm.dag()
    wt, k = t.omega_tilde, t.kappa
    chi1 = -1j / (k / 2 + 1j * (p.delta_c - wt))
    chi2 = 1j / (k / 2 + 1j * (wt - p.delta_c))
    ph1 = chi1 / abs(chi1) if chi1 != 0 else 1.0
    ph2 = chi2 / abs(chi2) if chi2 != 0 else 1.0
    H = 0.5 * wt * tz
    collapse = [(tm, r.kappa1 + rates.gamma_minus), (tp, r.kappa2 + rates.gamma_plus),
                (tz, rates.gamma_z)]
    ports = [Port(ph1 * tm, r.kappa1), Port(ph2 * tp, r.kappa2)]
    return Liouvillian.build(H, collapse, ports=ports, frame="drive",
                             meta={"model": "purcell", "params": p, "rates": r})


# --- eliminated emitter -----------------------------------------------------------


SIGNS = ("+", "-")


def _flip(s: str) -> str:
    return "-" if s == "+" else "+"


def qms_raw_coefficients(p: CavityParams) -> dict:
    """``Gamma^{n,m}_{s1,s2} = g^2 int dtau <t^{s1}(tau) t^{s2}>_0 exp(i s2 Dc_m tau)``.

    Uses the emitter alone (``gamma0`` and dephasing, no waveguide ports).
    Keys are ``(n, m, s1, s2)`` with 1-based modes.
    """
    t = p.tls
    L0 = bare_tls(replace(t, kappa=0.0))
    ops = {"+": pauli("plus"), "-": pauli("minus")}
    dcs = {1: p.delta_c, 2: -p.delta_c}
    raw = {}
    for m in (1, 2):
        for s2 in SIGNS:
            sgn = 1.0 if s2 == "+" else -1.0
            vals = laplace_correlation(L0, [ops["+"], ops["-"]], ops[s2], -sgn * dcs[m])
            for s1, v in zip(SIGNS, vals):
                for n in (1, 2):
                    raw[(n, m, s1, s2)] = p.g ** 2 * complex(v)
    return raw


def _ladder_sign(s: str) -> int:
    return 1 if s == "+" else -1


def qms_quadratic(p: CavityParams, secular: bool = True) -> QuadraticModel:
    """Quadratic cavity model after eliminating a fast driven emitter.

    The second-order generator is ``-G rho - rho G^dag + sum K a rho a`` with
    ``G = sum Gamma^{n,m}_{-s1,-s2} a_n^{s1} a_m^{s2}`` and jump weights
    ``K[(n,s1),(m,s2)] = conj(Gamma^{n,m}_{s1,s2}) + Gamma^{m,n}_{-s2,-s1}``;
    it is regrouped into the coefficient tables of :class:`QuadraticModel`.
    With ``secular`` only products whose cavity frequencies cancel are kept.
    """
    raw = qms_raw_coefficients(p)
    dcs = {1: p.delta_c, 2: -p.delta_c}
    tol = 1e-12 * max(1.0, abs(p.delta_c))

    def keep(n, s1, m, s2):
        if not secular:
            return True
        return abs(_ladder_sign(s1) * dcs[n] + _ladder_sign(s2) * dcs[m]) <= tol

    def R(n, m, s1, s2):
        return raw[(n, m, s1, s2)]

    Gam = np.zeros((2, 2), complex)
    gp = np.zeros((2, 2), complex)
    gm = np.zeros((2, 2), complex)
    gg = np.zeros((2, 2), complex)
    dd = np.zeros((2, 2), complex)
    for i in (1, 2):
        for j in (1, 2):
            I, J = i - 1, j - 1
            if keep(i, "-", j, "-"):
                Gam[I, J] = np.conj(R(i, j, "-", "-")) + R(j, i, "+", "+")
                gg[I, J] = -0.5j * (R(i, j, "+", "+") - np.conj(R(j, i, "-", "-")))
            if keep(i, "+", j, "-"):
                gp[I, J] = np.conj(R(i, j, "+", "-")) + R(j, i, "+", "-")
                gm[I, J] = np.conj(R(i, j, "-", "+")) + R(j, i, "-", "+")
                dd[I, J] = (-0.5j * (R(i, j, "-", "+") + R(j, i, "+", "-"))
                            + 0.5j * np.conj(R(j, i, "-", "+") + R(i, j, "+", "-")))
    L0 = bare_tls(replace(p.tls, kappa=0.0))
    tm_mean = pauli("minus").expect(L0.steady_state())
    drive = p.g * tm_mean * np.ones(2)
    return QuadraticModel(delta_c=p.delta_c, kappa=p.kappa, Gamma=Gam, g=gg,
                          gamma_p=gp, gamma_m=gm, delta=dd, drive=drive, raw=raw,
                          secular=secular, meta={"model": "qms", "params": p})


def qms_raw_generator(m: QuadraticModel):
    """``(h, l, K)`` assembled directly from the raw elimination integrals.

    Independent of the regrouping in :func:`qms_quadratic`; used to check it.
    Honors the secular flag of ``m``.
    """
    if m.raw is None:
        raise ValueError("model carries no raw coefficients")
    p = m.meta["params"]
    dcs = {1: p.delta_c, 2: -p.delta_c}
    tol = 1e-12 * max(1.0, abs(p.delta_c))
    idx = {(1, "-"): 0, (1, "+"): 1, (2, "-"): 2, (2, "+"): 3}
    G = np.zeros((4, 4), complex)
    K = np.zeros((4, 4), complex)
    for (n, mm, s1, s2), _ in m.raw.items():
        if m.secular and abs(_ladder_sign(s1) * dcs[n] + _ladder_sign(s2) * dcs[mm]) > tol:
            continue
        G[idx[(n, s1)], idx[(mm, s2)]] += m.raw[(n, mm, _flip(s1), _flip(s2))]
        K[idx[(n, s1)], idx[(mm, s2)]] += (np.conj(m.raw[(n, mm, s1, s2)])
                                           + m.raw[(mm, n, _flip(s2), _flip(s1))])
    # G^dag in ladder form: (c_p c_q)^dag = c_q^dag c_p^dag, and c^dag flips the index
    flip = np.array([1, 0, 3, 2])
    Gd = np.zeros((4, 4), complex)
    for p_ in range(4):
        for q in range(4):
            Gd[flip[q], flip[p_]] += np.conj(G[p_, q])
    h = -0.5j * (G - Gd)
    l = np.zeros(4, complex)
    for i in range(2):
        h[[1, 3][i], [0, 2][i]] += (1.0 if i == 0 else -1.0) * m.delta_c
        l[[1, 3][i]] += m.drive[i]
        l[[0, 2][i]] += np.conj(m.drive[i])
        K[[0, 2][i], [1, 3][i]] += m.kappa
    return h, l, K


# --- weak-coupling Bogoliubov analysis ------------------------------------------


@dataclass(frozen=True)
class BogoliubovRates:
    r_theta: float
    g_tms: float
    delta_shift: float
    gamma_c: float
    gamma_h: float
    gamma_theta: float
    n_th: float
    tau_z: float
    diverging: bool = False


def bogoliubov_weak_coupling(p: CavityParams) -> BogoliubovRates:
    """Cooling and heating of the Bogoliubov mode ``b1`` by the dressed emitter.

    At ``theta = pi/2`` the squeezing vanishes and the returned bundle has
    ``diverging=True`` (the thermal occupation of ``b1`` is unbounded).
    """
    th = p.tls.theta
    if th > np.pi / 2 + 1e-12:
        raise BranchError(f"theta = {th:.6g} > pi/2 has no real g_B")
    rates = dressed_rates(p.tls, p.delta_c)
    tz = (rates.gamma_plus - rates.gamma_minus) / (rates.gamma_plus + rates.gamma_minus)
    gB2 = p.g ** 2 * max(np.cos(th), 0.0)
    dz, gperp = rates.delta_z, rates.gamma_perp
    lor = gperp / (dz ** 2 + gperp ** 2)
    gc = gB2 * lor * (1.0 - tz)
    gh = gB2 * lor * (1.0 + tz)
    shift = gB2 * dz * tz / (dz ** 2 + gperp ** 2)
    # a1^dag a2^dag amplitude of shift * b1^dag b1
    g_tms = -p.g_c * p.g_s * dz * tz / (dz ** 2 + gperp ** 2)
    if abs(np.cos(th)) < 1e-12:
        return BogoliubovRates(np.inf, 0.0, 0.0, 0.0, 0.0, 0.0, np.inf, 0.0, diverging=True)
    r = float(np.arctanh(np.tan(th / 2) ** 2))
    n_th = gh / (gc - gh) if gc > gh else np.inf
    return BogoliubovRates(r, float(g_tms), float(shift), float(gc), float(gh),
                           float(gc - gh), float(n_th), float(tz))


def bogoliubov_quadratic(p: CavityParams) -> QuadraticModel:
    """Quadratic model ``shift b1^dag b1 + Gc D[b1] + Gh D[b1^dag]`` in cavity modes.

    Written in the drive frame with ``b1 = C a1 - S a2^dag``.
    """
    b = bogoliubov_weak_coupling(p)
    C, S = bogoliubov_coefficients(p)
    # b1 = C a1 - S a2^dag; b1^dag b1 = C^2 a1^dag a1 + S^2 a2 a2^dag - CS(a1^dag a2^dag + a1 a2)
    delta = np.diag([b.delta_shift * C ** 2, b.delta_shift * S ** 2]).astype(complex)
    g = np.zeros((2, 2), complex)
    g[0, 1] = g[1, 0] = -0.5 * b.delta_shift * C * S
    # Gc D[b1] + Gh D[b1^dag] expanded into the ladder tables
    Gam = np.zeros((2, 2), complex)
    gp = np.zeros((2, 2), complex)
    gm = np.zeros((2, 2), complex)
    gm[0, 0] += b.gamma_c * C ** 2
    gp[1, 1] += b.gamma_c * S ** 2
    Gam[0, 1] += -b.gamma_c * C * S
    gp[0, 0] += b.gamma_h * C ** 2
    gm[1, 1] += b.gamma_h * S ** 2
    Gam[1, 0] += -b.gamma_h * C * S
    return QuadraticModel(delta_c=p.delta_c, kappa=p.kappa, Gamma=Gam, g=g,
                          gamma_p=gp, gamma_m=gm, delta=delta,
                          meta={"model": "bogoliubov", "params": p, "rates": b})


@dataclass(frozen=True)
class ClosedForm:
    N: float
    M: float
    r_eff_first_order: float
    mu_eff_first_order: float


def qms_closed_form(r_theta: float, kappa: float, gamma_theta: float) -> ClosedForm:
    """Exact resonant ``N``, ``M`` and first-order ``r_eff``, ``mu_eff`` in ``kappa``."""
    if gamma_theta <= 0:
        raise ValueError("gamma_theta must be positive")
    x = kappa / gamma_theta
    N = np.sinh(2 * r_theta) ** 2 / (1 + x)
    M = np.sinh(4 * r_theta) / (2 * (1 + x))
    r1 = 2 * r_theta - 0.5 * x * np.sinh(4 * r_theta)
    mu1 = 1 - 4 * x * np.sinh(2 * r_theta) ** 2
    return ClosedForm(float(N), float(M), float(r1), float(mu1))
