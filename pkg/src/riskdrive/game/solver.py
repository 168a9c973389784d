"""Feedback Nash equilibrium of the risk-sensitive LQ game.

Backward recursion over the horizon. Each player i carries a quadratic
value-to-go ``V^i(x) = 0.5 x'Z x + zeta'x + c``. Per step:

1. Noise inflation. The entropic risk of a quadratic value over Gaussian
   noise w ~ N(0, W) is again quadratic, with

       Z_hat    = Z (I - theta W Z)^{-1}
       zeta_hat = (I - theta Z W)^{-1} zeta
       c_hat    = c + (theta/2) zeta' W (I - theta Z W)^{-1} zeta
                    - 1/(2 theta) * logdet(I - theta W Z)

   valid while all eigenvalues of theta*W*Z stay below 1. For theta -> 0
   the constant degenerates to the risk-neutral 0.5 tr(W Z); crossing the
   eigenvalue bound is the "neurotic breakdown": the risk functional is
   infinite and no policy exists. theta = 0 or W = 0 skip the transform
   entirely, which makes zero-noise gains exactly theta-invariant.

2. Simultaneous stage optimum. With everyone playing affine policies
   u^j = -K^j x - k^j, the coupled first-order conditions stack into one
   linear system (the classic LQ-Nash structure, with Z replaced by the
   inflated Z_hat):

       [R^{ii} + B_i' Zh_i B_i   B_i' Zh_i B_j ...] [K_i]   [B_i' Zh_i A]
       [ ...                                      ] [...] = [   ...     ]

   and the same left-hand side with right-hand side B_i' zeta_hat_i for the
   offsets k_i. A singular system means no unique simultaneous best
   response and raises EquilibriumError.

3. Value propagation through the closed loop F = A - sum_j B_j K_j.

Breakdown is reported through the solution flag (with the offending step
and player), never through non-finite gains.
"""

from __future__ import annotations

import numpy as np

from .types import EquilibriumError, LQGame, NashSolution, NeuroticBreakdownError

# Margin on the eigenvalue bound of theta*W*Z; at the bound the inflation
# is singular and the risk functional diverges.
BREAKDOWN_MARGIN = 1e-9
SINGULAR_RCOND = 1e-12


def _inflate(
    theta: float, W: np.ndarray, Z: np.ndarray, zeta: np.ndarray, c: float
) -> tuple[np.ndarray, np.ndarray, float] | None:
    """Risk-adjust one player's next-step value over the process noise.

    Returns None when the risk functional diverges (neurotic breakdown).
    """
    if theta == 0.0 or not W.any():
        trace_term = 0.5 * float(np.trace(W @ Z)) if W.any() else 0.0
        return Z, zeta, c + trace_term
    WZ = W @ Z
    # cheap spectral screen (|lambda| <= Frobenius norm); exact eigenvalues
    # only when the bound cannot rule a breakdown out
    if abs(theta) * np.sqrt((WZ * WZ).sum()) >= 0.9:
        eigs = np.linalg.eigvals(theta * WZ)
        if eigs.real.max() >= 1.0 - BREAKDOWN_MARGIN:
            return None
    X = np.eye(Z.shape[0]) - theta * WZ
    sign, logdet = np.linalg.slogdet(X)
    if sign <= 0:
        return None
    # Z_hat = Z X^{-1}; computed through a solve on the transposed system.
    Z_hat = np.linalg.solve(X.T, Z).T
    Z_hat = 0.5 * (Z_hat + Z_hat.T)
    zeta_hat = np.linalg.solve(X.T, zeta)
    c_hat = c + 0.5 * theta * float(zeta @ W @ zeta_hat) - logdet / (2.0 * theta)
    return Z_hat, zeta_hat, c_hat


def solve_nash(game: LQGame) -> NashSolution:
    """Coupled backward Riccati recursion for all players' feedback policies."""
    T = game.horizon
    N = game.n_players
    n = game.state_dim
    m = game.control_dims
    m_total = sum(m)
    splits = np.cumsum(m)[:-1]

    Z = [np.zeros((T + 1, n, n)) for _ in range(N)]
    zeta = [np.zeros((T + 1, n)) for _ in range(N)]
    c = np.zeros((N, T + 1))
    K = [np.zeros((T, m[i], n)) for i in range(N)]
    k = [np.zeros((T, m[i])) for i in range(N)]
    for i in range(N):
        Z[i][T] = game.Q[i][T]
        zeta[i][T] = game.l[i][T]

    for t in range(T - 1, -1, -1):
        A = game.A[t]
        B = [game.B[i][t] for i in range(N)]
        W = game.W[t]

        inflated = []
        for i in range(N):
            res = _inflate(game.thetas[i], W, Z[i][t + 1], zeta[i][t + 1], c[i][t + 1])
            if res is None:
                return NashSolution(
                    K=None,
                    k=None,
                    Z=None,
                    zeta=None,
                    c=None,
                    breakdown_flag=True,
                    breakdown_t=t,
                    breakdown_player=i,
                )
            inflated.append(res)

        S = np.zeros((m_total, m_total))
        Y = np.zeros((m_total, n + 1))
        row = 0
        for i in range(N):
            Z_hat, zeta_hat, _ = inflated[i]
            BiT_Z = B[i].T @ Z_hat
            col = 0
            for j in range(N):
                block = BiT_Z @ B[j]
                if i == j:
                    block = block + game.R[i][i][t]
                S[row : row + m[i], col : col + m[j]] = block
                col += m[j]
            Y[row : row + m[i], :n] = BiT_Z @ A
            Y[row : row + m[i], n] = B[i].T @ zeta_hat
            row += m[i]

        try:
            KV = np.linalg.solve(S, Y)
        except np.linalg.LinAlgError:
            # fallback jitter keeps genuinely solvable-but-ill-scaled systems alive
            try:
                KV = np.linalg.solve(S + 1e-9 * np.eye(m_total), Y)
            except np.linalg.LinAlgError:
                raise EquilibriumError(
                    f"singular simultaneous best-response system at step {t}"
                ) from None
        if not np.all(np.isfinite(KV)):
            raise EquilibriumError(f"non-finite stage gains at step {t}")
        # residual check guards against a silently near-singular solve
        scale = max(1.0, float(np.abs(Y).max()))
        residual = float(np.abs(S @ KV - Y).max())
        if residual > 1e-6 * scale:
            raise EquilibriumError(
                f"singular simultaneous best-response system at step {t} "
                f"(residual {residual:.2e})"
            )
        K_split = np.split(KV[:, :n], splits, axis=0)
        k_split = np.split(KV[:, n], splits, axis=0)

        F = A - sum(B[j] @ K_split[j] for j in range(N))
        beta = -sum(B[j] @ k_split[j] for j in range(N))
        for i in range(N):
            Z_hat, zeta_hat, c_hat = inflated[i]
            K[i][t] = K_split[i]
            k[i][t] = k_split[i]
            quad = game.Q[i][t] + F.T @ Z_hat @ F
            lin = game.l[i][t] + F.T @ (Z_hat @ beta + zeta_hat)
            const = (
                c_hat
                + 0.5 * float(beta @ Z_hat @ beta)
                + float(zeta_hat @ beta)
            )
            for j in range(N):
                Rij = game.R[i][j][t]
                if i != j and not Rij.any():
                    continue
                quad = quad + K_split[j].T @ Rij @ K_split[j]
                lin = lin + K_split[j].T @ Rij @ k_split[j]
                const += 0.5 * float(k_split[j] @ Rij @ k_split[j])
            Z[i][t] = 0.5 * (quad + quad.T)
            zeta[i][t] = lin
            c[i][t] = const

    return NashSolution(K=K, k=k, Z=Z, zeta=zeta, c=c)


def solve_nash_strict(game: LQGame) -> NashSolution:
    """solve_nash, but a breakdown raises instead of flagging."""
    solution = solve_nash(game)
    if solution.breakdown_flag:
        raise NeuroticBreakdownError(
            "neurotic breakdown: risk parameter outside the solvable range",
            solution.breakdown_t,
            solution.breakdown_player,
        )
    return solution
