"""Tensor-product box grids, 1-D radial grids and node-valued fields.

Difference operators are sparse matrices acting on the flat (C-ordered)
vector of node values.  Along each axis interior nodes use centred
three-point stencils; nodes on a face use second-order one-sided stencils
in the direction normal to that face.  Mixed derivatives are products of
the per-axis first-derivative operators, which reduces to the usual
four-corner cross away from the boundary.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidInputError

__all__ = ["RectGrid", "RadialGrid", "Field", "write_field_csv", "read_field_csv",
           "hessian_at", "gradient_at"]

MIN_NODES = 5


def _d1(m, h):
    d = sp.lil_matrix((m, m))
    d[0, 0:3] = np.array([-3.0, 4.0, -1.0]) / (2 * h)
    for i in range(1, m - 1):
        d[i, i - 1] = -0.5 / h
        d[i, i + 1] = 0.5 / h
    d[m - 1, m - 3:m] = np.array([1.0, -4.0, 3.0]) / (2 * h)
    return d.tocsr()


def _d2(m, h):
    d = sp.lil_matrix((m, m))
    d[0, 0:4] = np.array([2.0, -5.0, 4.0, -1.0]) / h**2
    for i in range(1, m - 1):
        d[i, i - 1:i + 2] = np.array([1.0, -2.0, 1.0]) / h**2
    d[m - 1, m - 4:m] = np.array([-1.0, 4.0, -5.0, 2.0]) / h**2
    return d.tocsr()


def _kron_axes(factors):
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return sp.csr_matrix(out)


class RectGrid:
    """Uniform node grid on the box prod_i [lower_i, upper_i].

    ``shape[i]`` counts nodes along axis i, end points included.
    """

    def __init__(self, lower, upper, shape):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.shape = tuple(int(m) for m in shape)
        self.n = len(self.shape)
        if self.lower.shape != (self.n,) or self.upper.shape != (self.n,):
            raise InvalidInputError("box bounds and grid shape disagree in dimension")
        if np.any(self.upper <= self.lower):
            raise InvalidInputError("box must have upper > lower on every axis")
        if min(self.shape) < MIN_NODES:
            raise InvalidInputError(f"grid too small: need at least {MIN_NODES} nodes per axis")
        self.spacing = (self.upper - self.lower) / (np.array(self.shape) - 1)
        self.size = int(np.prod(self.shape))

    def __repr__(self):
        return f"RectGrid(lower={self.lower.tolist()}, upper={self.upper.tolist()}, shape={self.shape})"

    @property
    def h(self):
        return float(self.spacing.max())

    @property
    def center(self):
        return 0.5 * (self.lower + self.upper)

    @property
    def inradius(self):
        return float(0.5 * (self.upper - self.lower).min())

    @cached_property
    def index(self):
        """Multi-indices of all nodes, shape (size, n)."""
        return np.stack(np.unravel_index(np.arange(self.size), self.shape), axis=-1)

    @cached_property
    def coords(self):
        return self.lower + self.index * self.spacing

    def flat(self, node):
        if np.isscalar(node):
            node = int(node)
            if not 0 <= node < self.size:
                raise InvalidInputError(f"node {node} out of range")
            return node
        return int(np.ravel_multi_index(tuple(node), self.shape))

    @cached_property
    def _sides(self):
        idx = self.index
        top = np.array(self.shape) - 1
        return (idx == 0).astype(int) * -1 + (idx == top).astype(int)

    @cached_property
    def boundary(self):
        return np.any(self._sides != 0, axis=1)

    @cached_property
    def interior(self):
        return ~self.boundary

    def node_class(self, node):
        count = int(np.count_nonzero(self._sides[self.flat(node)]))
        return ("interior", "face")[count] if count < 2 else "edge"

    @cached_property
    def normals(self):
        """Outward unit normals (averaged over adjoining faces); zero inside."""
        s = self._sides.astype(float)
        norm = np.linalg.norm(s, axis=1)
        out = np.zeros_like(s)
        nz = norm > 0
        out[nz] = s[nz] / norm[nz, None]
        return out

    def _axis_factors(self, ops):
        eyes = [sp.identity(m, format="csr") for m in self.shape]
        return _kron_axes([ops.get(i, eyes[i]) for i in range(self.n)])

    @cached_property
    def first(self):
        """D[i] approximates ∂/∂x_i at every node."""
        return [self._axis_factors({i: _d1(self.shape[i], self.spacing[i])}) for i in range(self.n)]

    @cached_property
    def second(self):
        """Dict (i, j), i <= j -> operator approximating ∂²/∂x_i∂x_j."""
        out = {}
        for i in range(self.n):
            out[i, i] = self._axis_factors({i: _d2(self.shape[i], self.spacing[i])})
            for j in range(i + 1, self.n):
                out[i, j] = self._axis_factors({
                    i: _d1(self.shape[i], self.spacing[i]),
                    j: _d1(self.shape[j], self.spacing[j]),
                })
        return out

    def gradient(self, values):
        return np.stack([d @ values for d in self.first], axis=-1)

    def hessian(self, values):
        hs = np.empty((self.size, self.n, self.n))
        for (i, j), d in self.second.items():
            hs[:, i, j] = hs[:, j, i] = d @ values
        return hs

    def hessian_norms(self, values):
        return np.linalg.norm(self.hessian(values), ord=2, axis=(1, 2))

    def center_node(self):
        return int(np.argmin(np.linalg.norm(self.coords - self.center, axis=1)))

    def csv_header(self):
        return (f"# grid n={self.n} dims={','.join(map(str, self.shape))} "
                f"origin={','.join(repr(float(v)) for v in self.lower)} "
                f"spacing={','.join(repr(float(v)) for v in self.spacing)}")


class RadialGrid:
    """Nodes r_j = j h on [0, R] for radial functions on a ball in R^n.

    The ball is centred at the origin; ``coords`` places node j at r_j e_1.
    """

    def __init__(self, n, radius, m):
        self.n = int(n)
        self.radius = float(radius)
        self.size = int(m)
        if self.n < 2:
            raise InvalidInputError("radial reduction needs n >= 2")
        if self.radius <= 0:
            raise InvalidInputError("radius must be positive")
        if self.size < MIN_NODES:
            raise InvalidInputError(f"grid too small: need at least {MIN_NODES} radial nodes")
        self.spacing = np.array([self.radius / (self.size - 1)])
        self.r = np.arange(self.size) * self.spacing[0]
        self.shape = (self.size,)

    def __repr__(self):
        return f"RadialGrid(n={self.n}, radius={self.radius}, m={self.size})"

    @property
    def h(self):
        return float(self.spacing[0])

    @property
    def center(self):
        return np.zeros(self.n)

    @property
    def inradius(self):
        return self.radius

    @cached_property
    def coords(self):
        x = np.zeros((self.size, self.n))
        x[:, 0] = self.r
        return x

    @cached_property
    def boundary(self):
        mask = np.zeros(self.size, dtype=bool)
        mask[-1] = True
        return mask

    @cached_property
    def interior(self):
        return ~self.boundary

    @cached_property
    def normals(self):
        out = np.zeros((self.size, self.n))
        out[-1, 0] = 1.0
        return out

    @cached_property
    def d1(self):
        """u'(r); row 0 is identically zero (symmetry u'(0) = 0)."""
        d = _d1(self.size, self.h).tolil()
        d[0, :] = 0.0
        return d.tocsr()

    @cached_property
    def d2(self):
        """u''(r); row 0 uses the symmetric ghost value u_{-1} = u_1."""
        d = _d2(self.size, self.h).tolil()
        d[0, :] = 0.0
        d[0, 0] = -2.0 / self.h**2
        d[0, 1] = 2.0 / self.h**2
        return d.tocsr()

    def radial_parts(self, values):
        """(u'', u', u'/r) with u'/r replaced by u''(0) at the centre."""
        upp = self.d2 @ values
        up = self.d1 @ values
        w = np.empty_like(up)
        w[1:] = up[1:] / self.r[1:]
        w[0] = upp[0]
        return upp, up, w

    def gradient(self, values):
        g = np.zeros((self.size, self.n))
        g[:, 0] = self.d1 @ values
        return g

    def hessian(self, values):
        upp, _, w = self.radial_parts(values)
        hs = np.zeros((self.size, self.n, self.n))
        hs[:, 0, 0] = upp
        for i in range(1, self.n):
            hs[:, i, i] = w
        return hs

    def hessian_norms(self, values):
        upp, _, w = self.radial_parts(values)
        return np.maximum(np.abs(upp), np.abs(w))

    def center_node(self):
        return 0

    def csv_header(self):
        return f"# grid n=1 dims={self.size} origin=0.0 spacing={self.h!r}"


@dataclass(frozen=True)
class Field:
    """One value per grid node (flat C order)."""

    grid: object
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if vals.size != self.grid.size:
            raise InvalidInputError(f"field has {vals.size} values for {self.grid.size} nodes")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("field has non-finite values")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid, func):
        """Sample ``func(coords)`` where coords has shape (size, n)."""
        return cls(grid, func(grid.coords))

    def gradient(self):
        return self.grid.gradient(self.values)

    def hessian(self):
        return self.grid.hessian(self.values)

    def gradient_norms(self):
        return np.linalg.norm(self.gradient(), axis=-1)

    def hessian_norms(self):
        return self.grid.hessian_norms(self.values)


def hessian_at(field, node):
    """Discrete D²u at one node (flat index or multi-index)."""
    grid = field.grid
    k = grid.flat(node) if isinstance(grid, RectGrid) else int(node)
    return grid.hessian(field.values)[k]


def gradient_at(field, node):
    grid = field.grid
    k = grid.flat(node) if isinstance(grid, RectGrid) else int(node)
    return grid.gradient(field.values)[k]


def write_field_csv(field, path):
    """Header line then ``i1,...,in,x1,...,xn,u`` per node (radial: ``i,r,u``)."""
    grid = field.grid
    lines = [grid.csv_header()]
    if isinstance(grid, RadialGrid):
        for j, (r, v) in enumerate(zip(grid.r, field.values)):
            lines.append(f"{j},{float(r)!r},{float(v)!r}")
    else:
        for idx, x, v in zip(grid.index, grid.coords, field.values):
            cells = [str(int(i)) for i in idx] + [repr(float(c)) for c in x] + [repr(float(v))]
            lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _header_fields(line):
    if not line.startswith("# grid "):
        raise InvalidInputError("field CSV must start with a '# grid' header")
    out = {}
    for part in line[len("# grid "):].split():
        key, _, val = part.partition("=")
        out[key] = val
    return out


def read_field_csv(path, radial_dim=None):
    """Inverse of :func:`write_field_csv`.

    A 1-D file is read back on a :class:`RadialGrid` when ``radial_dim``
    (the ambient dimension) is given.
    """
    with open(path) as fh:
        header = _header_fields(fh.readline().strip())
        rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    n = int(header["n"])
    dims = [int(v) for v in header["dims"].split(",")]
    origin = np.array([float(v) for v in header["origin"].split(",")])
    spacing = np.array([float(v) for v in header["spacing"].split(",")])
    values = rows[:, -1]
    if n == 1 and radial_dim is not None:
        grid = RadialGrid(radial_dim, spacing[0] * (dims[0] - 1), dims[0])
    else:
        grid = RectGrid(origin, origin + spacing * (np.array(dims) - 1), dims)
    return Field(grid, values)
