"""Synchronous round-based simulation of the quantized distributed solver.

Per round, every node updates its state from (a) the reconstructed neighbor
predictors minus its own predictor (consensus term) and (b) its private
gradient of the local residual, then broadcasts one quantized innovation
symbol per coordinate. Two modes:

* exact mode: constant gradient gain, geometrically shrinking scale
  ``s(k) = s0 * alpha**k``; converges exponentially to the exact solution.
* least-squares mode: diminishing gradient gain ``gamma(k)`` and scale
  ``s(k) = s_r * gamma(k)``; converges to the least-squares solution.

A robust variant routes the codec through the damped/noisy update.

State arrays are vectorized over nodes (all nodes advance in lockstep from
round-k state, which makes the update order-independent by construction),
but the arithmetic is identical to the per-node codec functions.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .codec import NoiseModel, QuantizerSpec
from .graph import Graph, build_laplacian
from .problem import LinearProblem, build_stacked, classify

__all__ = [
    "ExactConfig",
    "LSConfig",
    "GammaSchedule",
    "Trace",
    "SaturationError",
    "bound_B",
    "run_exact",
    "run_ls",
    "run_robust",
    "traces_dynamics_equal",
]

PRNG_ID = "numpy-pcg64"  # bit generator used for every seeded draw
STOP_TOL_DEFAULT = 1e-12


class SaturationError(RuntimeError):
    """Raised in strict mode when a quantizer input leaves the admissible range."""

    def __init__(self, round_index: int):
        super().__init__(f"quantizer saturated at round {round_index}")
        self.round_index = round_index


@dataclass(frozen=True)
class GammaSchedule:
    """Diminishing gain gamma(k) = (k0 / (k + k0))**delta.

    gamma(0) = 1; the ratio beta(k) = gamma(k)/gamma(k+1) decreases toward 1.
    """

    k0: float
    delta: float

    def __post_init__(self):
        if self.k0 <= 0:
            raise ValueError("k0 must be positive")
        if not (0.5 < self.delta <= 1.0):
            raise ValueError("delta must lie in (1/2, 1]")

    def gamma(self, k) -> float:
        return (self.k0 / (np.asarray(k, dtype=float) + self.k0)) ** self.delta

    def beta(self, k) -> float:
        return (1.0 + 1.0 / (np.asarray(k, dtype=float) + self.k0)) ** self.delta

    @property
    def beta0(self) -> float:
        return float((1.0 + 1.0 / self.k0) ** self.delta)


@dataclass(frozen=True)
class ExactConfig:
    h: float
    alpha: float
    s0: float
    K: int
    max_rounds: int = 3000
    strict_saturation: bool = False
    x0: np.ndarray | None = None    # explicit initial states (N x m)
    cx: float | None = None         # or uniform random in [-cx, cx]
    stop_tol: float = STOP_TOL_DEFAULT
    seed: int = 0

    def __post_init__(self):
        if self.h <= 0 or self.s0 <= 0 or self.K < 1 or self.max_rounds < 1:
            raise ValueError("invalid exact-mode configuration")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")


@dataclass(frozen=True)
class LSConfig:
    h: float
    K: int
    s_r: float
    gamma: GammaSchedule
    max_rounds: int = 20000
    strict_saturation: bool = False
    x0: np.ndarray | None = None
    cx: float | None = None
    stop_tol: float = STOP_TOL_DEFAULT
    seed: int = 0

    def __post_init__(self):
        if self.h <= 0 or self.s_r <= 0 or self.K < 1 or self.max_rounds < 1:
            raise ValueError("invalid least-squares configuration")


@dataclass
class Trace:
    """Per-round record of one run. Row 0 is the initial state."""

    mode: str                       # exact | ls | robust | baseline
    k: np.ndarray
    err2: np.ndarray
    bound_Bk: np.ndarray | None
    ratio_err_gamma: np.ndarray | None
    max_quant_input: np.ndarray     # nan at round 0 (no transmission yet)
    saturation_count: np.ndarray    # cumulative saturation events
    bits_cum: np.ndarray            # cumulative fixed-rate transmitted bits
    err_inf_per_node: np.ndarray    # (rounds+1, N)
    bits_cum_nonzero: np.ndarray    # cumulative bits with zero symbols unsent
    drift: np.ndarray | None = None  # robust mode: max ||xhat_ij - b_j||_inf
    stop_reason: str = "max_rounds"
    x_final: np.ndarray | None = None
    y_ref: np.ndarray | None = None
    seed: int = 0
    prng: str = PRNG_ID
    extra_header: dict = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return len(self.k) - 1

    def csv_text(self) -> str:
        """Render the trace in the standard CSV layout.

        Numbers are written with 17 significant digits (round-trip exact);
        columns that do not apply to the mode are left empty.
        """
        buf = io.StringIO()
        buf.write(f"# mode={self.mode} prng={self.prng} seed={self.seed}\n")
        for key in sorted(self.extra_header):
            buf.write(f"# {key}={self.extra_header[key]}\n")
        buf.write("k,err2,bound_Bk,ratio_err_gamma,max_quant_input,"
                  "saturation_count,bits_cum\n")

        def num(v):
            if v is None or (isinstance(v, float) and math.isnan(v)):
                return ""
            return f"{v:.17g}"

        for idx in range(len(self.k)):
            row = [
                str(int(self.k[idx])),
                num(float(self.err2[idx])),
                num(float(self.bound_Bk[idx])) if self.bound_Bk is not None else "",
                num(float(self.ratio_err_gamma[idx]))
                if self.ratio_err_gamma is not None else "",
                num(float(self.max_quant_input[idx])),
                str(int(self.saturation_count[idx])),
                str(int(self.bits_cum[idx])),
            ]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.csv_text())

    def summary(self) -> dict:
        return {
            "mode": self.mode,
            "rounds": self.rounds,
            "final_err2": float(self.err2[-1]),
            "final_err_inf_max": float(self.err_inf_per_node[-1].max()),
            "saturation_total": int(self.saturation_count[-1]),
            "bits_total": int(self.bits_cum[-1]),
            "bits_total_nonzero": int(self.bits_cum_nonzero[-1]),
            "stop_reason": self.stop_reason,
        }


def traces_dynamics_equal(a: Trace, b: Trace) -> bool:
    """True when two traces describe identical dynamics.

    The bit-accounting column is excluded on purpose: a larger alphabet
    costs more bits per symbol even when the trajectories coincide.
    """
    return (
        len(a.k) == len(b.k)
        and np.array_equal(a.err2, b.err2)
        and np.array_equal(a.err_inf_per_node, b.err_inf_per_node)
        and np.array_equal(a.max_quant_input[1:], b.max_quant_input[1:])
        and np.array_equal(a.saturation_count, b.saturation_count)
    )


def bound_B(k, h: float, s0: float, alpha: float, fd_min: float,
            lambdaN: float, m: int, n: int):
    """Closed-form exponential envelope for the exact-mode error norm.

    B(k) = h * s0 * alpha**k * sqrt(mN) * lambdaN / (2 alpha (alpha - rho_h))
    with rho_h = 1 - h * fd_min. Only defined for alpha > rho_h.
    """
    rho_h = 1.0 - h * fd_min
    if alpha <= rho_h:
        raise ValueError("rate bound undefined: alpha must exceed 1 - h*fd_min")
    kk = np.asarray(k, dtype=float)
    return (h * s0 * alpha ** kk * np.sqrt(m * n) * lambdaN
            / (2.0 * alpha * (alpha - rho_h)))


def _initial_states(p: LinearProblem, cfg) -> np.ndarray:
    n, m = p.n_nodes, p.dim
    if cfg.x0 is not None:
        x0 = np.array(cfg.x0, dtype=float)
        if x0.shape != (n, m):
            raise ValueError("x0 must have shape (N, m)")
        return x0
    if cfg.cx is not None:
        rng = np.random.default_rng(cfg.seed)
        return rng.uniform(-cfg.cx, cfg.cx, size=(n, m))
    return np.zeros((n, m))


def _run_core(p: LinearProblem, g: Graph, cfg, mode: str,
              noise: NoiseModel | None = None) -> Trace:
    """Shared round loop for all modes; see the module docstring."""
    n, m = p.n_nodes, p.dim
    lap = build_laplacian(g)
    ops = build_stacked(p, lap)
    cls = classify(p)
    if cls.kind == "Unsupported":
        raise ValueError("problem is rank deficient")
    y_ref = cls.solution

    exact_like = mode in ("exact", "robust")
    if exact_like:
        if cls.kind != "UniqueExact" and mode == "exact":
            raise ValueError("exact mode requires an exactly solvable system")
        rho_h = 1.0 - cfg.h * ops.fd_min
        h_cap = 2.0 / (ops.fd_min + ops.fd_max)
        if not (0.0 < cfg.h < h_cap) or not (rho_h < cfg.alpha < 1.0):
            warnings.warn("configuration violates the convergence guarantees; "
                          "running anyway", RuntimeWarning, stacklevel=3)
        have_bound = cfg.alpha > rho_h

    x = _initial_states(p, cfg)
    adj = g.adjacency()
    deg = adj.sum(axis=1)
    K = cfg.K
    spec = QuantizerSpec(K)
    bits_fixed_per_round = int(2 * len(g.edges) * m * spec.bits_per_coord)

    b = np.zeros((n, m))
    xhat = np.zeros((n, n, m))  # xhat[i, j] = reconstruction at i of sender j
    mask = adj[:, :, None]

    # robust mode: damping, initialization errors, round-off noise.
    # Draw order (documented, fixed): encoder initialization errors for
    # nodes 1..N, then decoder initialization errors for directed edges
    # (receiver, sender) in lexicographic order; per round, encoder
    # round-off noise for nodes 1..N, then decoder round-off noise in the
    # same directed-edge order.
    rng = None
    directed = None
    damping = 1.0
    if mode == "robust":
        assert noise is not None
        damping = noise.damping
        rng = np.random.default_rng(noise.seed)
        directed = [(i, j) for i in range(n) for j in range(n) if adj[i, j] > 0]
        if noise.init_errors_enabled:
            lo, hi = noise.init_error_range
            b = rng.uniform(lo, hi, size=(n, m))
            draws = rng.uniform(lo, hi, size=(len(directed), m))
            for (idx, (i, j)) in enumerate(directed):
                xhat[i, j] = draws[idx]

    hx = np.einsum("ij,ij->i", p.H, x)
    grad = (hx - p.z)[:, None] * p.H

    def err_stats(xv):
        diff = xv - y_ref[None, :]
        return (float(np.linalg.norm(diff)),
                np.abs(diff).max(axis=1))

    e2, einf = err_stats(x)
    rec_k = [0]
    rec_err2 = [e2]
    rec_einf = [einf]
    rec_maxin = [float("nan")]
    rec_sat = [0]
    rec_bits = [0]
    rec_bits_nz = [0]
    rec_bound = [None]
    rec_ratio = [None]
    rec_drift = [float("nan")] if mode == "robust" else None

    if exact_like and have_bound:
        rec_bound[0] = float(bound_B(0, cfg.h, cfg.s0, cfg.alpha,
                                     ops.fd_min, lap.lambdaN, m, n))
    if mode == "ls":
        rec_ratio[0] = float(einf.max() / cfg.gamma.gamma(0))

    sat_total = 0
    bits_total = 0
    bits_nz_total = 0
    stop_reason = "max_rounds"

    for k in range(1, cfg.max_rounds + 1):
        if mode == "ls":
            g_prev = float(cfg.gamma.gamma(k - 1))
            s_prev = cfg.s_r * g_prev
        else:
            g_prev = 1.0
            s_prev = cfg.s0 * cfg.alpha ** (k - 1)

        # state update from round-(k-1) information (consensus term is zero
        # at the first update because all codec states start at rest)
        cons = xhat.sum(axis=1) - deg[:, None] * b
        x = x + cfg.h * (cons - g_prev * grad)

        # transmission of round k: encode x(k) at scale s(k-1)
        arg = (x - b) / s_prev
        mag = np.ceil(np.abs(arg) - 0.5)
        q = np.sign(arg) * np.minimum(np.maximum(mag, 0.0), K)
        node_peaks = np.abs(arg).max(axis=1)
        sat_total += int((node_peaks > K + 0.5).sum())
        if cfg.strict_saturation and (node_peaks > K + 0.5).any():
            raise SaturationError(k)

        sq = s_prev * q
        if mode == "robust" and noise.roundoff_enabled:
            nb = rng.uniform(-noise.roundoff_amp, noise.roundoff_amp,
                             size=(n, m))
            nx_draws = rng.uniform(-noise.roundoff_amp, noise.roundoff_amp,
                                   size=(len(directed), m))
            nx = np.zeros((n, n, m))
            for (idx, (i, j)) in enumerate(directed):
                nx[i, j] = nx_draws[idx]
            b = sq + damping * b + nb
            xhat = (sq[None, :, :] + damping * xhat + nx) * mask
        elif mode == "robust" and damping != 1.0:
            b = sq + damping * b
            xhat = (sq[None, :, :] + damping * xhat) * mask
        else:
            b = sq + b
            xhat = (sq[None, :, :] + xhat) * mask

        bits_total += bits_fixed_per_round
        bits_nz_total += int(spec.bits_per_coord
                             * (deg * (q != 0).sum(axis=1)).sum())

        hx = np.einsum("ij,ij->i", p.H, x)
        grad = (hx - p.z)[:, None] * p.H

        e2, einf = err_stats(x)
        rec_k.append(k)
        rec_err2.append(e2)
        rec_einf.append(einf)
        rec_maxin.append(float(node_peaks.max()))
        rec_sat.append(sat_total)
        rec_bits.append(bits_total)
        rec_bits_nz.append(bits_nz_total)
        if exact_like:
            rec_bound.append(
                float(bound_B(k, cfg.h, cfg.s0, cfg.alpha, ops.fd_min,
                              lap.lambdaN, m, n)) if have_bound else None)
            rec_ratio.append(None)
        else:
            rec_bound.append(None)
            rec_ratio.append(float(einf.max() / cfg.gamma.gamma(k)))
        if mode == "robust":
            rec_drift.append(float((np.abs(xhat - b[None, :, :]) * mask).max()))

        if e2 < cfg.stop_tol:
            stop_reason = "error_tolerance"
            break

    def col(vals):
        return np.array([float("nan") if v is None else v for v in vals])

    bound_col = col(rec_bound) if exact_like and have_bound else None
    ratio_col = col(rec_ratio) if mode == "ls" else None
    return Trace(
        mode=mode,
        k=np.array(rec_k),
        err2=np.array(rec_err2),
        bound_Bk=bound_col,
        ratio_err_gamma=ratio_col,
        max_quant_input=np.array(rec_maxin),
        saturation_count=np.array(rec_sat, dtype=np.int64),
        bits_cum=np.array(rec_bits, dtype=np.int64),
        bits_cum_nonzero=np.array(rec_bits_nz, dtype=np.int64),
        err_inf_per_node=np.array(rec_einf),
        drift=np.array(rec_drift) if mode == "robust" else None,
        stop_reason=stop_reason,
        x_final=x,
        y_ref=y_ref,
        seed=cfg.seed,
    )


def run_exact(p: LinearProblem, g: Graph, cfg: ExactConfig) -> Trace:
    """Exact-mode run; requires an exactly solvable system."""
    return _run_core(p, g, cfg, "exact")


def run_ls(p: LinearProblem, g: Graph, cfg: LSConfig) -> Trace:
    """Least-squares-mode run (also accepts exactly solvable systems)."""
    return _run_core(p, g, cfg, "ls")


def run_robust(p: LinearProblem, g: Graph, cfg: ExactConfig,
               noise: NoiseModel) -> Trace:
    """Exact-mode run with the damped/noisy codec variant."""
    if noise.is_ideal():
        tr = _run_core(p, g, cfg, "exact")
        tr.mode = "robust"
        return tr
    return _run_core(p, g, cfg, "robust", noise=noise)
