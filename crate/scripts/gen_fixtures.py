"""Regenerates the Matrix Market fixtures in crates/core/data.

Deterministic: re-running produces byte-identical files.
"""
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"


def fmt(v):
    return repr(float(v))


def nos4_like():
    # 100x100 stiffness-like pattern with 347 stored lower-triangle entries:
    # couplings at offsets 1 (99), 10 (90) and 2 (first 58 rows).
    n = 100
    rng = np.random.default_rng(4)
    edges = [(i + 1, i) for i in range(n - 1)]
    edges += [(i + 10, i) for i in range(n - 10)]
    edges += [(i + 2, i) for i in range(58)]
    w = rng.uniform(0.5, 1.5, len(edges))
    lap = np.zeros((n, n))
    for (i, j), wij in zip(edges, w):
        lap[i, j] = lap[j, i] = -wij
        lap[i, i] += wij
        lap[j, j] += wij
    lmax = np.linalg.eigvalsh(lap)[-1]
    shift = lmax / (1.5e3 - 1.0)
    a = lap + shift * np.eye(n)
    a *= 0.85 / np.linalg.eigvalsh(a)[-1]
    lines = [
        "%%MatrixMarket matrix coordinate real symmetric",
        "%-------------------------------------------------------------------------------",
        "% nos4-like structural test matrix (synthetic stand-in)",
        "% 100 x 100, 347 stored entries, kappa ~ 1.5e3, ||A||_2 ~ 0.85",
        "%-------------------------------------------------------------------------------",
        f"{n} {n} {n + len(edges)}",
    ]
    entries = [(i, i) for i in range(n)] + edges
    entries.sort(key=lambda e: (e[1], e[0]))
    for i, j in entries:
        lines.append(f"{i + 1} {j + 1} {fmt(a[i, j])}")
    return "\n".join(lines) + "\n"


def bcsstm02_like():
    # diagonal mass matrix, 66 x 66, kappa = 8.8, ||A||_2 = 0.17
    n = 66
    rng = np.random.default_rng(2)
    d = rng.uniform(0.17 / 8.8, 0.17, n)
    d[0], d[1] = 0.17, 0.17 / 8.8
    lines = [
        "%%MatrixMarket matrix coordinate real symmetric",
        "% bcsstm02-like lumped mass matrix (synthetic stand-in)",
        f"{n} {n} {n}",
    ]
    lines += [f"{i + 1} {i + 1} {fmt(v)}" for i, v in enumerate(d)]
    return "\n".join(lines) + "\n"


def small_array():
    # 4 x 4 SPD, lower triangle stored column-major
    a = np.array([[4.0, 1.0, 0.0, 0.5], [1.0, 3.0, -1.0, 0.0], [0.0, -1.0, 5.0, 1.0], [0.5, 0.0, 1.0, 2.0]])
    lines = ["%%MatrixMarket matrix array real symmetric", "4 4"]
    for j in range(4):
        for i in range(j, 4):
            lines.append(fmt(a[i, j]))
    return "\n".join(lines) + "\n"


def small_general():
    # 5 x 5 symmetric tridiagonal stored in full (general) form, integer field
    n = 5
    entries = []
    for i in range(n):
        entries.append((i, i, 4))
        if i + 1 < n:
            entries.append((i + 1, i, -1))
            entries.append((i, i + 1, -1))
    lines = ["%%MatrixMarket matrix coordinate integer general", f"{n} {n} {len(entries)}"]
    lines += [f"{i + 1} {j + 1} {v}" for i, j, v in entries]
    return "\n".join(lines) + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, text in [
        ("nos4_like.mtx", nos4_like()),
        ("bcsstm02_like.mtx", bcsstm02_like()),
        ("small_array.mtx", small_array()),
        ("small_general.mtx", small_general()),
    ]:
        (OUT / name).write_text(text)


if __name__ == "__main__":
    main()
