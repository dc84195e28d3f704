"""LARFDSSOM: a growing self-organizing map with per-node relevance vectors.

Each node keeps a center, a running moment of its distance to the inputs it
wins (per dimension) and a relevance vector derived from that moment. The
relevance vector masks dimensions in the distance metric, so different nodes
cluster in different subspaces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .params import MapParams

SNAPSHOT_HEADER = "larfdssom-snapshot v1"


@dataclass
class MapNode:
    center: np.ndarray
    dist_moment: np.ndarray
    relevance: np.ndarray
    wins: float = 0.0
    neighbors: set[int] = field(default_factory=set)

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.dist_moment = np.asarray(self.dist_moment, dtype=float)
        self.relevance = np.asarray(self.relevance, dtype=float)
        m = self.center.shape
        if self.dist_moment.shape != m or self.relevance.shape != m:
            raise ValueError("center, dist_moment and relevance must share one length")


@dataclass(frozen=True)
class StepEvent:
    """Outcome of one self-organization step.

    ``kind`` is ``"inserted"`` or ``"updated"``; ``pruned`` counts nodes removed
    by a prune that fired on the same step.
    """

    kind: str
    node_id: int
    activation: float
    pruned: int = 0

    @property
    def inserted(self) -> bool:
        return self.kind == "inserted"


def _check_dim(x: np.ndarray, m: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m:
        raise ValueError(f"dimension mismatch: expected length {m}, got shape {x.shape}")
    return x


def weighted_distance(x, node: MapNode) -> float:
    x = _check_dim(x, node.center.shape[0])
    diff = node.relevance * (x - node.center)
    return float(np.sqrt(np.dot(diff, diff)))


def activation(x, node: MapNode, epsilon: float) -> float:
    d = weighted_distance(x, node)
    return 1.0 / (1.0 + d / (float(np.dot(node.relevance, node.relevance)) + epsilon))


def relevance_from_moments(delta: np.ndarray, s: float) -> np.ndarray:
    """Logistic relevance: dimensions with above-average moment get low relevance.

    Works row-wise on a 2-D array. Rows whose moments are all equal get 1.
    """
    delta = np.asarray(delta, dtype=float)
    lo = delta.min(axis=-1, keepdims=True)
    hi = delta.max(axis=-1, keepdims=True)
    mean = delta.mean(axis=-1, keepdims=True)
    scale = s * (hi - lo)
    # a spread so small that s*spread underflows counts as flat
    flat = scale == 0
    with np.errstate(over="ignore"):
        z = (mean - delta) / np.where(flat, 1.0, scale)
    return np.where(flat, 1.0, expit(z))


def update_node(node: MapNode, x, rate: float, params: MapParams) -> MapNode:
    x = _check_dim(x, node.center.shape[0])
    if rate == 0:
        return replace(node, center=node.center.copy(), dist_moment=node.dist_moment.copy(),
                       relevance=node.relevance.copy(), neighbors=set(node.neighbors))
    eb = rate * params.beta
    dist = (1.0 - eb) * node.dist_moment + eb * np.abs(x - node.center)
    center = node.center + rate * (x - node.center)
    return replace(node, center=center, dist_moment=dist,
                   relevance=relevance_from_moments(dist, params.s),
                   neighbors=set(node.neighbors))


def _cosine_rows(w: np.ndarray, rows: np.ndarray) -> np.ndarray:
    num = rows @ w
    den = np.linalg.norm(rows, axis=1) * np.linalg.norm(w)
    out = np.zeros(len(rows))
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


class SomMap:
    """A LARFDSSOM instance.

    Nodes are held in parallel arrays and addressed by stable integer ids, which
    survive pruning. ``rng_seed`` drives tie-breaking and random initialization.
    """

    def __init__(self, params: MapParams, dim: int, rng_seed: int = 0, init=None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.params = params
        self.dim = dim
        self.rng_seed = rng_seed
        self.rng = np.random.default_rng(rng_seed)
        self.nwins = 1
        self._ids: list[int] = []
        self._next_id = 0
        self._c = np.empty((0, dim))
        self._d = np.empty((0, dim))
        self._w = np.empty((0, dim))
        self._wins = np.empty(0)
        self._adj: dict[int, set[int]] = {}
        if init is None:
            init = self.rng.uniform(0.0, 1.0, size=dim)
        self._append(_check_dim(init, dim), wins=0.0)

    # -- node storage ---------------------------------------------------
    def __len__(self) -> int:
        return len(self._ids)

    @property
    def node_ids(self) -> list[int]:
        return list(self._ids)

    @property
    def nodes(self) -> list[MapNode]:
        return [self.node(i) for i in self._ids]

    def _index(self, node_id: int) -> int:
        try:
            return self._ids.index(node_id)
        except ValueError:
            raise KeyError(f"no node with id {node_id}") from None

    def node(self, node_id: int) -> MapNode:
        k = self._index(node_id)
        return MapNode(self._c[k].copy(), self._d[k].copy(), self._w[k].copy(),
                       float(self._wins[k]), set(self._adj[node_id]))

    def _append(self, x: np.ndarray, wins: float) -> int:
        nid = self._next_id
        self._next_id += 1
        self._ids.append(nid)
        self._c = np.vstack([self._c, x])
        self._d = np.vstack([self._d, np.zeros(self.dim)])
        self._w = np.vstack([self._w, np.ones(self.dim)])
        self._wins = np.append(self._wins, wins)
        self._adj[nid] = set()
        return nid

    # -- recognition ----------------------------------------------------
    def activations(self, x) -> np.ndarray:
        x = _check_dim(x, self.dim)
        diff = self._w * (x - self._c)
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        norm2 = np.einsum("ij,ij->i", self._w, self._w)
        return 1.0 / (1.0 + dist / (norm2 + self.params.epsilon))

    def find_winner(self, x) -> tuple[int, float]:
        if not self._ids:
            raise ValueError("map has no nodes")
        acts = self.activations(x)
        best = acts.max()
        tied = np.flatnonzero(acts == best)
        k = int(tied[0]) if len(tied) == 1 else int(self.rng.choice(tied))
        return self._ids[k], float(best)

    def max_activation(self, x) -> float:
        return float(self.activations(x).max())

    def cluster_assign(self, x) -> list[tuple[int, float]]:
        """Frozen-map recognition: every node at or above ``a_t``, best first."""
        acts = self.activations(x)
        order = np.argsort(-acts, kind="stable")
        out = []
        for k in order:
            if acts[k] < self.params.a_t:
                break
            out.append((self._ids[k], float(acts[k])))
        return out

    # -- self-organization ----------------------------------------------
    def setup_neighborhood(self, node_id: int) -> None:
        k = self._index(node_id)
        for other in self._adj[node_id]:
            self._adj[other].discard(node_id)
        self._adj[node_id] = set()
        cos = _cosine_rows(self._w[k], self._w)
        for j, oid in enumerate(self._ids):
            if oid != node_id and cos[j] > self.params.conn_thr:
                self._adj[node_id].add(oid)
                self._adj[oid].add(node_id)

    def rebuild_connections(self) -> None:
        for nid in self._ids:
            self._adj[nid] = set()
        w = self._w
        norms = np.linalg.norm(w, axis=1)
        den = np.outer(norms, norms)
        cos = np.divide(w @ w.T, den, out=np.zeros_like(den), where=den > 0)
        for a in range(len(self._ids)):
            for b in range(a + 1, len(self._ids)):
                if cos[a, b] > self.params.conn_thr:
                    self._adj[self._ids[a]].add(self._ids[b])
                    self._adj[self._ids[b]].add(self._ids[a])

    def _update_rows(self, rows: np.ndarray, x: np.ndarray, rate: float) -> None:
        eb = rate * self.params.beta
        self._d[rows] = (1.0 - eb) * self._d[rows] + eb * np.abs(x - self._c[rows])
        self._c[rows] = self._c[rows] + rate * (x - self._c[rows])
        self._w[rows] = relevance_from_moments(self._d[rows], self.params.s)

    def prune(self) -> int:
        limit = self.params.lp * self.params.maxcomp
        keep = self._wins >= limit
        if not keep.any():
            # never empty the map: keep the most frequent winner
            keep[int(np.argmax(self._wins))] = True
        removed = [nid for nid, k in zip(self._ids, keep) if not k]
        self._ids = [nid for nid, k in zip(self._ids, keep) if k]
        self._c, self._d, self._w = self._c[keep], self._d[keep], self._w[keep]
        self._wins = np.zeros(int(keep.sum()))
        for nid in removed:
            del self._adj[nid]
        self.rebuild_connections()
        return len(removed)

    def organize_step(self, x) -> StepEvent:
        x = _check_dim(x, self.dim)
        p = self.params
        sid, act = self.find_winner(x)
        if act < p.a_t and (p.n_max is None or len(self) < p.n_max):
            nid = self._append(x.copy(), wins=p.lp * self.nwins)
            self.setup_neighborhood(nid)
            kind = "inserted"
        else:
            nid = sid
            k = self._index(sid)
            neigh = [self._index(j) for j in sorted(self._adj[sid])]
            if neigh and p.e_n > 0:
                self._update_rows(np.array(neigh), x, p.e_n)
            self._update_rows(np.array([k]), x, p.e_b)
            self._wins[k] += 1
            kind = "updated"
        pruned = 0
        if self.nwins == p.maxcomp:
            pruned = self.prune()
            self.nwins = 0
        self.nwins += 1
        return StepEvent(kind, nid, act, pruned)

    def train(self, stream, passes: int = 1) -> list[StepEvent]:
        events = []
        for _ in range(passes):
            for x in stream:
                events.append(self.organize_step(x))
        return events

    # -- serialization --------------------------------------------------
    def to_text(self) -> str:
        p = self.params
        lines = [SNAPSHOT_HEADER]
        for name in ("a_t", "lp", "beta", "maxcomp", "e_b", "e_n", "s", "conn_thr", "n_max", "epsilon"):
            lines.append(f"param {name} {_num(getattr(p, name))}")
        lines.append(f"dim {self.dim}")
        lines.append(f"rng_seed {self.rng_seed}")
        lines.append(f"rng_state {json.dumps(self.rng.bit_generator.state, sort_keys=True)}")
        lines.append(f"nwins {self.nwins}")
        lines.append(f"next_id {self._next_id}")
        lines.append(f"nodes {len(self)}")
        for k, nid in enumerate(self._ids):
            lines.append(f"node {nid} wins {_num(self._wins[k])}")
            lines.append("center " + " ".join(_num(v) for v in self._c[k]))
            lines.append("dist_moment " + " ".join(_num(v) for v in self._d[k]))
            lines.append("relevance " + " ".join(_num(v) for v in self._w[k]))
            lines.append("neighbors " + " ".join(str(j) for j in sorted(self._adj[nid])))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SomMap":
        lines = text.splitlines()
        if not lines or lines[0].strip() != SNAPSHOT_HEADER:
            raise ValueError("not a LARFDSSOM snapshot")
        it = iter(lines[1:])
        raw = {}
        for _ in range(10):
            _, name, value = next(it).split(" ", 2)
            raw[name] = value
        params = MapParams(
            a_t=float(raw["a_t"]), lp=float(raw["lp"]), beta=float(raw["beta"]),
            maxcomp=int(raw["maxcomp"]), e_b=float(raw["e_b"]), e_n=float(raw["e_n"]),
            s=float(raw["s"]), conn_thr=float(raw["conn_thr"]),
            n_max=None if raw["n_max"] == "none" else int(raw["n_max"]),
            epsilon=float(raw["epsilon"]),
        )
        fields = dict(next(it).split(" ", 1) for _ in range(6))
        dim = int(fields["dim"])
        m = cls.__new__(cls)
        m.params = params
        m.dim = dim
        m.rng_seed = int(fields["rng_seed"])
        m.rng = np.random.default_rng()
        m.rng.bit_generator.state = json.loads(fields["rng_state"])
        m.nwins = int(fields["nwins"])
        m._next_id = int(fields["next_id"])
        n = int(fields["nodes"])
        m._ids, m._adj = [], {}
        c, d, w, wins = [], [], [], []
        for _ in range(n):
            head = next(it).split()
            nid = int(head[1])
            m._ids.append(nid)
            wins.append(float(head[3]))
            c.append([float(v) for v in next(it).split()[1:]])
            d.append([float(v) for v in next(it).split()[1:]])
            w.append([float(v) for v in next(it).split()[1:]])
            m._adj[nid] = {int(v) for v in next(it).split()[1:]}
        m._c = np.array(c, dtype=float).reshape(n, dim)
        m._d = np.array(d, dtype=float).reshape(n, dim)
        m._w = np.array(w, dtype=float).reshape(n, dim)
        m._wins = np.array(wins, dtype=float)
        return m

    def copy(self) -> "SomMap":
        return SomMap.from_text(self.to_text())


def _num(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")
