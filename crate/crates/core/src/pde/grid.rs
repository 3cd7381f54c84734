use crate::error::{Error, Result};
use crate::scalar::{count, Real};

/// Uniform node grid on the rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDomain<T> {
    x0: T,
    x1: T,
    y0: T,
    y1: T,
    nx: usize,
    ny: usize,
}

impl<T: Real> GridDomain<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T, nx: usize, ny: usize) -> Result<Self> {
        if !(x0 < x1) || !(y0 < y1) {
            return Err(Error::InvalidInput(format!(
                "empty rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidInput(format!("grid {nx}x{ny} is smaller than 3x3")));
        }
        Ok(Self { x0, x1, y0, y1, nx, ny })
    }

    /// Square grid with the same node count along both axes.
    pub fn square(lo: T, hi: T, nodes: usize) -> Result<Self> {
        Self::new(lo, hi, lo, hi, nodes, nodes)
    }

    pub fn x0(&self) -> T {
        self.x0
    }
    pub fn x1(&self) -> T {
        self.x1
    }
    pub fn y0(&self) -> T {
        self.y0
    }
    pub fn y1(&self) -> T {
        self.y1
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> T {
        (self.x1 - self.x0) / count(self.nx - 1)
    }

    pub fn hy(&self) -> T {
        (self.y1 - self.y0) / count(self.ny - 1)
    }

    pub fn x(&self, i: usize) -> T {
        if i == self.nx - 1 {
            self.x1
        } else {
            self.x0 + count::<T>(i) * self.hx()
        }
    }

    pub fn y(&self, j: usize) -> T {
        if j == self.ny - 1 {
            self.y1
        } else {
            self.y0 + count::<T>(j) * self.hy()
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of node `(i, j)`; x varies fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    pub fn boundary_len(&self) -> usize {
        2 * (self.nx + self.ny) - 4
    }

    /// Boundary nodes as a closed counterclockwise traversal from `(x0, y0)`.
    pub fn boundary_nodes(&self) -> Vec<(usize, usize)> {
        let (nx, ny) = (self.nx, self.ny);
        let mut out = Vec::with_capacity(self.boundary_len());
        out.extend((0..nx).map(|i| (i, 0)));
        out.extend((1..ny).map(|j| (nx - 1, j)));
        out.extend((0..nx - 1).rev().map(|i| (i, ny - 1)));
        out.extend((1..ny - 1).rev().map(|j| (0, j)));
        out
    }

    /// Interior nodes in storage order.
    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.ny - 1).flat_map(move |j| (1..self.nx - 1).map(move |i| (i, j)))
    }

    /// True when `(x, y)` lies in the closed rectangle.
    pub fn contains(&self, x: T, y: T) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Node values of a scalar on a [`GridDomain`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D<T> {
    domain: GridDomain<T>,
    values: Vec<T>,
}

impl<T: Real> ScalarField2D<T> {
    pub fn new(domain: GridDomain<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a {}x{} grid",
                values.len(),
                domain.nx(),
                domain.ny()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite field value".into()));
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: GridDomain<T>) -> Self {
        Self {
            values: vec![T::zero(); domain.len()],
            domain,
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(domain: GridDomain<T>, f: impl Fn(T, T) -> T) -> Self {
        let mut values = Vec::with_capacity(domain.len());
        for j in 0..domain.ny() {
            for i in 0..domain.nx() {
                values.push(f(domain.x(i), domain.y(j)));
            }
        }
        Self { domain, values }
    }

    pub fn domain(&self) -> &GridDomain<T> {
        &self.domain
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.domain.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.domain.index(i, j);
        self.values[k] = v;
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Largest magnitude over interior nodes only.
    pub fn interior_max_abs(&self) -> T {
        self.domain
            .interior_nodes()
            .fold(T::zero(), |acc, (i, j)| acc.max(self.at(i, j).abs()))
    }

    /// Central difference in x at an interior column.
    #[inline]
    pub fn dx_central(&self, i: usize, j: usize) -> T {
        (self.at(i + 1, j) - self.at(i - 1, j)) / (self.domain.hx() + self.domain.hx())
    }

    /// Central difference in y at an interior row.
    #[inline]
    pub fn dy_central(&self, i: usize, j: usize) -> T {
        (self.at(i, j + 1) - self.at(i, j - 1)) / (self.domain.hy() + self.domain.hy())
    }

    #[inline]
    pub fn dxx(&self, i: usize, j: usize) -> T {
        let h = self.domain.hx();
        (self.at(i + 1, j) - self.at(i, j) - self.at(i, j) + self.at(i - 1, j)) / (h * h)
    }

    #[inline]
    pub fn dyy(&self, i: usize, j: usize) -> T {
        let h = self.domain.hy();
        (self.at(i, j + 1) - self.at(i, j) - self.at(i, j) + self.at(i, j - 1)) / (h * h)
    }

    /// x-derivative at any node: central inside, second-order one-sided at the edges.
    pub fn dx(&self, i: usize, j: usize) -> T {
        let nx = self.domain.nx();
        let h2 = self.domain.hx() + self.domain.hx();
        let three = count::<T>(3);
        let four = count::<T>(4);
        if i == 0 {
            (-three * self.at(0, j) + four * self.at(1, j) - self.at(2, j)) / h2
        } else if i == nx - 1 {
            (three * self.at(nx - 1, j) - four * self.at(nx - 2, j) + self.at(nx - 3, j)) / h2
        } else {
            self.dx_central(i, j)
        }
    }

    /// y-derivative at any node: central inside, second-order one-sided at the edges.
    pub fn dy(&self, i: usize, j: usize) -> T {
        let ny = self.domain.ny();
        let h2 = self.domain.hy() + self.domain.hy();
        let three = count::<T>(3);
        let four = count::<T>(4);
        if j == 0 {
            (-three * self.at(i, 0) + four * self.at(i, 1) - self.at(i, 2)) / h2
        } else if j == ny - 1 {
            (three * self.at(i, ny - 1) - four * self.at(i, ny - 2) + self.at(i, ny - 3)) / h2
        } else {
            self.dy_central(i, j)
        }
    }

    /// Bilinear interpolation at `(x, y)` inside the domain.
    pub fn interpolate(&self, x: T, y: T) -> Result<T> {
        let d = &self.domain;
        if !d.contains(x, y) {
            return Err(Error::OutOfDomain);
        }
        let fx = (x - d.x0()) / d.hx();
        let fy = (y - d.y0()) / d.hy();
        let i = fx.floor().to_usize().unwrap_or(0).min(d.nx() - 2);
        let j = fy.floor().to_usize().unwrap_or(0).min(d.ny() - 2);
        let tx = fx - count(i);
        let ty = fy - count(j);
        let one = T::one();
        Ok(self.at(i, j) * (one - tx) * (one - ty)
            + self.at(i + 1, j) * tx * (one - ty)
            + self.at(i, j + 1) * (one - tx) * ty
            + self.at(i + 1, j + 1) * tx * ty)
    }
}

/// Dirichlet data on the boundary nodes, ordered as [`GridDomain::boundary_nodes`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData<T> {
    values: Vec<T>,
}

impl<T: Real> BoundaryData<T> {
    pub fn new(domain: &GridDomain<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != domain.boundary_len() {
            return Err(Error::InvalidInput(format!(
                "boundary traversal has {} values, grid needs {}",
                values.len(),
                domain.boundary_len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite boundary value".into()));
        }
        Ok(Self { values })
    }

    /// Samples `phi(x, y)` along the boundary traversal.
    pub fn from_fn(domain: &GridDomain<T>, phi: impl Fn(T, T) -> T) -> Self {
        Self {
            values: domain
                .boundary_nodes()
                .into_iter()
                .map(|(i, j)| phi(domain.x(i), domain.y(j)))
                .collect(),
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }
}
