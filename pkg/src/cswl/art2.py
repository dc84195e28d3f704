"""ART2 with context units.

The network is a standard ART2 (F1 sublayers U, W, P, Q, X, V; F2 groups with
top-down ``T`` and bottom-up ``B`` weights) extended with context units ``UC``
that keep a decaying average of the noise-suppressed input. Weight rows have
length ``2n``: the first ``n`` entries serve the pattern, the last ``n`` the
context.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .params import Art2Params

SNAPSHOT_HEADER = "art2-context-snapshot v1"


@dataclass
class F1State:
    u: np.ndarray
    w: np.ndarray
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    s: np.ndarray
    x: np.ndarray
    v: np.ndarray


class Art2Network:
    def __init__(self, params: Art2Params, n: int | None = None):
        n = params.n if n is None else n
        if n < 1:
            raise ValueError("input size n must be >= 1")
        self.params = dataclasses.replace(params, n=n)
        self.n = n
        self.uc = np.zeros(n)
        self.pc = np.zeros(2 * n)
        self.top_down = np.empty((0, 2 * n))
        self.bottom_up = np.empty((0, 2 * n))
        z = np.zeros(n)
        self.f1 = F1State(z, z, z, z, z, z, z, z)

    @property
    def group_count(self) -> int:
        return len(self.top_down)

    def noise_suppress(self, x):
        """``x`` where ``x >= theta``, else 0 (scalar or array)."""
        x = np.asarray(x, dtype=float)
        out = np.where(x >= self.params.theta, x, 0.0)
        return float(out) if out.ndim == 0 else out

    def context_vector(self) -> np.ndarray:
        return self.uc.copy()

    def _initial_bottom_up(self) -> np.ndarray:
        p = self.params
        return np.full(2 * self.n, 0.5 / ((1.0 - p.d) * np.sqrt(self.n)))

    def _norm(self, v: np.ndarray) -> float:
        return float(np.linalg.norm(v))

    def _present(self, s: np.ndarray) -> None:
        """F1 initialization and first update, then the context recurrence."""
        p = self.params
        f = self.noise_suppress
        e = p.e
        x = s / (e + self._norm(s))
        v = f(x)
        u = v / (e + self._norm(v))
        w = s + p.a * u
        pp = u.copy()
        x = w / (e + self._norm(w))
        q = pp / (e + self._norm(pp))
        v = f(x) + p.b * f(q)
        self.f1 = F1State(u=u, w=w, p=pp, q=q, r=np.zeros(self.n), s=s, x=x, v=v)

        self.uc = p.back * self.uc + (1.0 - p.back) * f(u)
        self.uc = self.uc / (e + self._norm(self.uc))
        self.pc[: self.n] = self.uc

    def f2_activations(self) -> np.ndarray:
        """Bottom-up F2 input with the context partition blended in by ``cw``."""
        p = self.params
        n = self.n
        pp = self.f1.p
        return ((1.0 - p.cw) * (self.bottom_up[:, :n] @ pp)
                + p.cw * (self.bottom_up[:, n:] @ pp))

    def _match(self, j: int) -> tuple[float, np.ndarray, np.ndarray]:
        """Norm of the reset vector R for candidate group ``j``."""
        p = self.params
        n = self.n
        e = p.e
        u = self.f1.v / (e + self._norm(self.f1.v))
        pp = u + p.d * self.top_down[j, :n]
        pc = self.pc.copy()
        pc[n:] = self.top_down[j, n:]
        r = (u + p.c * pp + p.cw) / (e + self._norm(u) + p.c * self._norm(pp) + p.cw * self._norm(pc))
        return self._norm(r), u, pp

    def _accept(self, j: int, u: np.ndarray, pp: np.ndarray) -> None:
        p = self.params
        f = self.noise_suppress
        e = p.e
        s = self.f1.s
        self.pc[self.n:] = self.top_down[j, self.n:]
        w = s + p.a * u
        x = w / (e + self._norm(w))
        q = pp / (e + self._norm(pp))
        v = f(x) + p.b * f(q)
        self.f1 = dataclasses.replace(self.f1, u=u, w=w, p=pp, x=x, q=q, v=v)

    def _learn(self, j: int) -> None:
        p = self.params
        n = self.n
        f = self.noise_suppress
        e = p.e
        s = self.f1.s
        keep = 1.0 + p.alpha * p.d * (p.d - 1.0)
        keep_ctx = 1.0 + p.alpha_ctx * p.d_ctx * (p.d_ctx - 1.0)
        for _ in range(p.n_iter):
            u = self.f1.u
            for mat in (self.top_down, self.bottom_up):
                mat[j, :n] = p.alpha * p.d * u + keep * mat[j, :n]
                mat[j, n:] = p.alpha_ctx * p.d_ctx * self.uc + keep_ctx * mat[j, n:]
                norm = self._norm(mat[j])
                if norm > 0:
                    mat[j] /= norm
            v = self.f1.v
            u = v / (e + self._norm(v))
            w = s + p.a * u
            pp = u + p.d * self.top_down[j, :n]
            x = w / (e + self._norm(w))
            q = pp / (e + self._norm(pp))
            v = f(x) + p.b * f(q)
            self.f1 = dataclasses.replace(self.f1, u=u, w=w, p=pp, x=x, q=q, v=v)

    def _commit_new(self) -> int:
        self.top_down = np.vstack([self.top_down, np.zeros(2 * self.n)])
        self.bottom_up = np.vstack([self.bottom_up, self._initial_bottom_up()])
        return self.group_count - 1

    def _check_input(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if s.shape != (self.n,):
            raise ValueError(f"expected input of length {self.n}, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("input contains non-finite values")
        return s

    def train_pattern(self, s) -> tuple[int, bool]:
        """Present one stimulus with learning. Returns ``(group, created)``."""
        s = self._check_input(s)
        self._present(s)
        y = self.f2_activations()
        enabled = np.ones(self.group_count, dtype=bool)
        rho = self.params.rho
        e = self.params.e
        for _ in range(self.group_count + 1):
            if not enabled.any():
                j = self._commit_new()
                self._learn(j)
                return j, True
            cand = np.where(enabled, y, -np.inf)
            j = int(np.argmax(cand))
            r_norm, u, pp = self._match(j)
            if r_norm < rho - e:
                enabled[j] = False
                continue
            self._accept(j, u, pp)
            self._learn(j)
            return j, False
        raise RuntimeError("reset loop exceeded its bound")  # unreachable

    def train(self, stimuli) -> list[tuple[int, bool]]:
        out = []
        for _ in range(self.params.epochs):
            for s in stimuli:
                out.append(self.train_pattern(s))
        return out

    def recognize_pattern(self, s) -> int:
        """Search without learning, relaxing vigilance until some group resonates.

        Context units advance as in training; weights are untouched.
        """
        if self.group_count == 0:
            raise ValueError("no committed groups to recognize against")
        s = self._check_input(s)
        self._present(s)
        p = self.params
        y = self.f2_activations()
        order = np.argsort(-y, kind="stable")
        norms = np.array([self._match(int(j))[0] for j in range(self.group_count)])
        rho = p.rho
        while True:
            for j in order:
                if norms[j] >= rho - p.e:
                    return int(j)
            if rho <= p.rho_floor:
                return int(order[0])
            rho = max(p.rho_floor, rho - p.rho_step)

    def advance(self, s, learn: bool = True) -> int:
        if learn or self.group_count == 0:
            return self.train_pattern(s)[0]
        return self.recognize_pattern(s)

    # -- serialization --------------------------------------------------
    def to_text(self) -> str:
        lines = [SNAPSHOT_HEADER]
        for k, v in dataclasses.asdict(self.params).items():
            lines.append(f"param {k} {_num(v)}")
        lines.append("uc " + " ".join(_num(v) for v in self.uc))
        lines.append("pc " + " ".join(_num(v) for v in self.pc))
        lines.append(f"groups {self.group_count}")
        for j in range(self.group_count):
            lines.append("t " + " ".join(_num(v) for v in self.top_down[j]))
            lines.append("b " + " ".join(_num(v) for v in self.bottom_up[j]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Art2Network":
        lines = text.splitlines()
        if not lines or lines[0].strip() != SNAPSHOT_HEADER:
            raise ValueError("not an ART2-with-context snapshot")
        it = iter(lines[1:])
        kwargs = {}
        fields = {f.name: f.type for f in dataclasses.fields(Art2Params)}
        for _ in range(len(fields)):
            _, name, value = next(it).split(" ", 2)
            kwargs[name] = int(value) if fields[name] in ("int", int) else float(value)
        net = cls(Art2Params(**kwargs))
        net.uc = np.array([float(v) for v in next(it).split()[1:]])
        net.pc = np.array([float(v) for v in next(it).split()[1:]])
        g = int(next(it).split()[1])
        t, b = [], []
        for _ in range(g):
            t.append([float(v) for v in next(it).split()[1:]])
            b.append([float(v) for v in next(it).split()[1:]])
        net.top_down = np.array(t, dtype=float).reshape(g, 2 * net.n)
        net.bottom_up = np.array(b, dtype=float).reshape(g, 2 * net.n)
        return net


def _num(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")
