"""Export of the CRB-trace SDP in SDPA sparse format, plus a reader.

Problem solved by an SDPA-compatible solver::

    minimize    sum_v c_v x_v
    subject to  sum_v x_v F_v - F_0  >= 0   (block diagonal, PSD)

Variables (1-based in the file):

* ``R_ii`` for i = 1..N (real diagonal),
* ``Re R_ij`` for i < j in row-major order,
* ``Im R_ij`` for i < j in row-major order,
* ``t_1 .. t_3K`` (objective weight 1).

Blocks:

* ``1..3K``: ``[[F(R), e_k], [e_k^T, t_k]] >= 0`` with ``F`` the real FIM,
* ``3K+1``: ``[[Re R, -Im R], [Im R, Re R]] >= 0`` (equivalent to ``R >= 0``),
* ``3K+2``: ``tr(Q_c R) - Gamma >= 0``,
* ``3K+3`` and ``3K+4``: ``tr R - P >= 0`` and ``P - tr R >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel_model import CommChannel
from .config import Scenario
from .errors import IsacError
from .fim import NoiseModel, fim_multi

FMT = "%.17g"


@dataclass
class SdpaProblem:
    block_sizes: list[int]
    c: np.ndarray
    entries: list[tuple[int, int, int, int, float]]  # (matno, blkno, i, j, value), 1-based, i <= j
    comments: list[str] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.c)

    def block_matrices(self, x) -> list[np.ndarray]:
        """Evaluate ``sum_v x_v F_v - F_0`` block by block (full symmetric matrices)."""
        x = np.asarray(x, dtype=float)
        blocks = [np.zeros((abs(n), abs(n))) for n in self.block_sizes]
        for mat, blk, i, j, v in self.entries:
            w = -v if mat == 0 else v * x[mat - 1]
            blocks[blk - 1][i - 1, j - 1] += w
            if i != j:
                blocks[blk - 1][j - 1, i - 1] += w
        return blocks

    def body(self) -> str:
        lines = [str(self.num_vars), str(len(self.block_sizes)),
                 " ".join(str(n) for n in self.block_sizes),
                 " ".join(FMT % v for v in self.c)]
        for mat, blk, i, j, v in sorted(self.entries, key=lambda e: e[:4]):
            lines.append(f"{mat} {blk} {i} {j} {FMT % v}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        return "".join(f"* {c}\n" for c in self.comments) + self.body()


def parse_sdpa(text: str) -> SdpaProblem:
    comments = []
    data = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line[0] in "\"*":
            if not data:
                comments.append(line[1:].strip())
            continue
        data.append(line)
    if len(data) < 4:
        raise IsacError("truncated SDPA file")
    clean = [d.replace(",", " ").replace("{", " ").replace("}", " ").replace("(", " ").replace(")", " ")
             for d in data]
    m = int(clean[0].split()[0])
    nblocks = int(clean[1].split()[0])
    sizes = [int(v) for v in clean[2].split()[:nblocks]]
    c = np.array([float(v) for v in clean[3].split()[:m]])
    entries = []
    for d in clean[4:]:
        parts = d.split()
        entries.append((int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]), float(parts[4])))
    if len(c) != m or len(sizes) != nblocks:
        raise IsacError("SDPA header does not match its declared sizes")
    return SdpaProblem(block_sizes=sizes, c=c, entries=entries, comments=comments)


def covariance_basis(n: int) -> list[np.ndarray]:
    """Hermitian basis matrices in the file's variable order."""
    basis = []
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in pairs:
        E = np.zeros((n, n), dtype=complex)
        E[i, j] = E[j, i] = 1.0
        basis.append(E)
    for i, j in pairs:
        E = np.zeros((n, n), dtype=complex)
        E[i, j] = 1j
        E[j, i] = -1j
        basis.append(E)
    return basis


def pack_covariance(R: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=complex)
    n = R.shape[0]
    iu = np.triu_indices(n, 1)
    return np.concatenate([np.diag(R).real, R[iu].real, R[iu].imag])


def build_sdp(scn: Scenario, ch: CommChannel, Gamma: float) -> SdpaProblem:
    n = scn.n_t
    k3 = 3 * scn.num_targets
    ss = scn.steering_set()
    noise = NoiseModel.white(scn.sigma_s_sq, scn.n_r)
    basis = covariance_basis(n)
    nr = len(basis)
    blk_R, blk_snr, blk_tr_lo, blk_tr_hi = k3 + 1, k3 + 2, k3 + 3, k3 + 4
    entries = []

    def add(mat, blk, M, drop):
        rows, cols = np.triu_indices(M.shape[0])
        for i, j in zip(rows, cols):
            v = float(M[i, j])
            if abs(v) > drop:
                entries.append((mat, blk, int(i) + 1, int(j) + 1, v))

    Qc = ch.Q_c
    for v, E in enumerate(basis, start=1):
        F = fim_multi(ss, scn.alphas, E, noise, scn.T).F
        drop = 1e-13 * max(np.abs(F).max(), 1e-300)
        for k in range(k3):
            S = np.zeros((k3 + 1, k3 + 1))
            S[:k3, :k3] = F
            add(v, k + 1, S, drop)
        add(v, blk_R, np.block([[E.real, -E.imag], [E.imag, E.real]]), 0.0)
        snr = float(np.trace(Qc @ E).real)
        if snr != 0.0:
            entries.append((v, blk_snr, 1, 1, snr))
        tr = float(np.trace(E).real)
        if tr != 0.0:
            entries.append((v, blk_tr_lo, 1, 1, tr))
            entries.append((v, blk_tr_hi, 1, 1, -tr))
    for k in range(k3):
        entries.append((nr + k + 1, k + 1, k3 + 1, k3 + 1, 1.0))
        entries.append((0, k + 1, k + 1, k3 + 1, -1.0))
    entries.append((0, blk_snr, 1, 1, float(Gamma)))
    entries.append((0, blk_tr_lo, 1, 1, float(scn.P)))
    entries.append((0, blk_tr_hi, 1, 1, -float(scn.P)))

    c = np.concatenate([np.zeros(nr), np.ones(k3)])
    comments = [
        "CRB-trace waveform design SDP (SDPA sparse format)",
        f"N_t={n} N_r={scn.n_r} K={scn.num_targets} T={scn.T} P_mw={FMT % scn.P}"
        f" sigma_s_sq_mw={FMT % scn.sigma_s_sq} Gamma_mw={FMT % Gamma}",
        f"variables 1..{n}: R_ii; {n + 1}..{n + (nr - n) // 2}: Re R_ij (i<j, row-major);"
        f" {n + (nr - n) // 2 + 1}..{nr}: Im R_ij (i<j, row-major); {nr + 1}..{nr + k3}: t_1..t_{k3}",
        f"blocks 1..{k3}: [[F(R), e_k], [e_k^T, t_k]] >= 0, F = real {k3}x{k3} FIM",
        f"block {blk_R}: [[Re R, -Im R], [Im R, Re R]] >= 0 (real embedding of R >= 0)",
        f"block {blk_snr}: tr(Q_c R) - Gamma >= 0",
        f"blocks {blk_tr_lo},{blk_tr_hi}: tr(R) - P >= 0 and P - tr(R) >= 0 (trace equality)",
    ]
    sizes = [k3 + 1] * k3 + [2 * n, 1, 1, 1]
    return SdpaProblem(block_sizes=sizes, c=c, entries=entries, comments=comments)


def export_sdp(scn: Scenario, ch: CommChannel, Gamma: float, path) -> SdpaProblem:
    problem = build_sdp(scn, ch, Gamma)
    path = Path(path)
    try:
        path.write_text(problem.to_text())
    except OSError as exc:
        raise IsacError(f"cannot write SDP file {str(path)!r}: {exc.strerror}") from None
    return problem


def candidate_point(problem: SdpaProblem, R: np.ndarray, F: np.ndarray, slack: float = 1e-9) -> np.ndarray:
    """Variable vector for covariance ``R`` with ``t_k`` set just above ``[F^-1]_kk``."""
    t = np.diag(np.linalg.inv(F)) * (1.0 + slack)
    return np.concatenate([pack_covariance(R), t])
