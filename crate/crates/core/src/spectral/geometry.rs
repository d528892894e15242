//! Model geometries: products of periodic one-dimensional axes with a
//! reflection that negates one coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometryKind {
    /// Unit circle of length 2π.
    Circle { n_points: usize },
    /// Flat torus with every side of length 2π.
    Torus { dims: Vec<usize> },
    /// Periodic box standing in for ℝᵈ; node coordinates are centred on 0.
    PeriodicGrid { extent: Vec<f64>, points: Vec<usize> },
    /// Periodic time axis times a circular slice; Θ negates time.
    Cylinder {
        time_points: usize,
        time_extent: f64,
        slice_points: usize,
    },
}

/// One periodic axis. Mode `k` has angular wavenumber `k * wave_scale`.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub points: usize,
    pub length: f64,
    pub wave_scale: f64,
}

impl Axis {
    fn angular(points: usize) -> Self {
        // wave_scale = 1 exactly keeps circle eigenvalues integral
        Axis {
            points,
            length: 2.0 * std::f64::consts::PI,
            wave_scale: 1.0,
        }
    }

    fn with_length(points: usize, length: f64) -> Self {
        Axis {
            points,
            length,
            wave_scale: 2.0 * std::f64::consts::PI / length,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Coordinate of node `i`, wrapped into `(-L/2, L/2]`.
    pub fn coordinate(&self, i: usize) -> f64 {
        let h = self.spacing();
        if 2 * i > self.points {
            (i as f64 - self.points as f64) * h
        } else {
            i as f64 * h
        }
    }

    pub fn reflect(&self, i: usize) -> usize {
        (self.points - i) % self.points
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Geometry {
    #[serde(flatten)]
    kind: GeometryKind,
    reflection_axis: usize,
    #[serde(skip)]
    axes: Vec<Axis>,
    #[serde(skip)]
    strides: Vec<usize>,
}

impl Geometry {
    pub fn new(kind: GeometryKind, reflection_axis: usize) -> Result<Self> {
        let axes = match &kind {
            GeometryKind::Circle { n_points } => vec![Axis::angular(*n_points)],
            GeometryKind::Torus { dims } => dims.iter().map(|&n| Axis::angular(n)).collect(),
            GeometryKind::PeriodicGrid { extent, points } => {
                if extent.len() != points.len() {
                    return Err(Error::config(
                        "geometry.extent",
                        format!("{} extents for {} axes", extent.len(), points.len()),
                    ));
                }
                for (a, &l) in extent.iter().enumerate() {
                    if !(l.is_finite() && l > 0.0) {
                        return Err(Error::config(
                            format!("geometry.extent[{a}]"),
                            "must be a positive real",
                        ));
                    }
                }
                extent
                    .iter()
                    .zip(points)
                    .map(|(&l, &n)| Axis::with_length(n, l))
                    .collect()
            }
            GeometryKind::Cylinder {
                time_points,
                time_extent,
                slice_points,
            } => {
                if !(time_extent.is_finite() && *time_extent > 0.0) {
                    return Err(Error::config("geometry.time_extent", "must be a positive real"));
                }
                vec![
                    Axis::with_length(*time_points, *time_extent),
                    Axis::angular(*slice_points),
                ]
            }
        };
        if axes.is_empty() {
            return Err(Error::config("geometry.points", "at least one axis is required"));
        }
        if axes.len() > MAX_DIM {
            return Err(Error::Unsupported(format!(
                "dimension {} exceeds the maximum of {MAX_DIM}",
                axes.len()
            )));
        }
        for (a, axis) in axes.iter().enumerate() {
            if axis.points == 0 || axis.points % 2 != 0 {
                return Err(Error::config(
                    format!("geometry.points[{a}]"),
                    format!("point count {} must be positive and even", axis.points),
                ));
            }
        }
        if reflection_axis >= axes.len() {
            return Err(Error::config(
                "geometry.reflection_axis",
                format!("axis {reflection_axis} out of range for dimension {}", axes.len()),
            ));
        }
        let mut strides = vec![1; axes.len()];
        for a in (0..axes.len() - 1).rev() {
            strides[a] = strides[a + 1] * axes[a + 1].points;
        }
        Ok(Geometry {
            kind,
            reflection_axis,
            axes,
            strides,
        })
    }

    pub fn circle(n_points: usize) -> Result<Self> {
        Self::new(GeometryKind::Circle { n_points }, 0)
    }

    pub fn torus(dims: &[usize]) -> Result<Self> {
        Self::new(GeometryKind::Torus { dims: dims.to_vec() }, 0)
    }

    pub fn periodic_grid(extent: &[f64], points: &[usize]) -> Result<Self> {
        Self::new(
            GeometryKind::PeriodicGrid {
                extent: extent.to_vec(),
                points: points.to_vec(),
            },
            0,
        )
    }

    pub fn cylinder(time_points: usize, time_extent: f64, slice_points: usize) -> Result<Self> {
        Self::new(
            GeometryKind::Cylinder {
                time_points,
                time_extent,
                slice_points,
            },
            0,
        )
    }

    pub fn kind(&self) -> &GeometryKind {
        &self.kind
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn num_nodes(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn reflection_axis(&self) -> usize {
        self.reflection_axis
    }

    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|a| a.length).product()
    }

    /// Uniform trapezoid weight attached to every node.
    pub fn quadrature_weight(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        self.axes
            .iter()
            .zip(&self.strides)
            .map(|(axis, &s)| (node / s) % axis.points)
            .collect()
    }

    pub fn node_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coordinates(&self, node: usize) -> Vec<f64> {
        self.multi_index(node)
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis.coordinate(i))
            .collect()
    }

    /// Coordinate along the reflection axis (the "time" of the reflection).
    pub fn normal_coordinate(&self, node: usize) -> f64 {
        let a = self.reflection_axis;
        let i = (node / self.strides[a]) % self.axes[a].points;
        self.axes[a].coordinate(i)
    }

    pub fn reflect_node(&self, node: usize) -> usize {
        let a = self.reflection_axis;
        let s = self.strides[a];
        let n = self.axes[a].points;
        let i = (node / s) % n;
        node - i * s + self.axes[a].reflect(i) * s
    }

    pub fn reflection_permutation(&self) -> Vec<usize> {
        (0..self.num_nodes()).map(|v| self.reflect_node(v)).collect()
    }

    /// Nearest neighbours along every axis, with periodic wrap.
    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let idx = self.multi_index(node);
        let mut out = Vec::with_capacity(2 * self.dim());
        for (a, axis) in self.axes.iter().enumerate() {
            let n = axis.points;
            for step in [1, n - 1] {
                let j = (idx[a] + step) % n;
                let v = node - idx[a] * self.strides[a] + j * self.strides[a];
                if v != node && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.num_nodes()).map(|v| self.neighbors(v)).collect()
    }

    /// Standard partition `M₊ ∪ Σ ∪ M₋` by the sign of the reflection coordinate.
    /// The seam at `±L/2` is fixed by Θ and belongs to the interface.
    pub fn partition(&self) -> RegionPartition {
        let a = self.reflection_axis;
        let n = self.axes[a].points;
        let mut plus = vec![false; self.num_nodes()];
        let mut minus = vec![false; self.num_nodes()];
        let mut interface = vec![false; self.num_nodes()];
        for v in 0..self.num_nodes() {
            let i = (v / self.strides[a]) % n;
            if i == 0 || 2 * i == n {
                interface[v] = true;
            } else if 2 * i < n {
                plus[v] = true;
            } else {
                minus[v] = true;
            }
        }
        RegionPartition { plus, minus, interface }
    }
}

/// Which part of a [`RegionPartition`] a weight vector describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionPartition {
    pub plus: Vec<bool>,
    pub minus: Vec<bool>,
    pub interface: Vec<bool>,
}

impl RegionPartition {
    /// Checks disjointness, coverage and compatibility with Θ.
    pub fn validate(&self, geometry: &Geometry) -> Result<()> {
        let n = geometry.num_nodes();
        if self.plus.len() != n || self.minus.len() != n || self.interface.len() != n {
            return Err(Error::Precondition(
                "partition masks do not match the node count".into(),
            ));
        }
        for v in 0..n {
            let count = self.plus[v] as u8 + self.minus[v] as u8 + self.interface[v] as u8;
            if count != 1 {
                return Err(Error::Precondition(format!("node {v} is covered {count} times")));
            }
            let r = geometry.reflect_node(v);
            if self.plus[v] != self.minus[r] || (self.interface[v] && r != v && !self.interface[r]) {
                return Err(Error::Precondition(format!(
                    "reflection does not respect the partition at node {v}"
                )));
            }
            if self.interface[v] && r != v {
                return Err(Error::Precondition(format!(
                    "interface node {v} is not fixed by the reflection"
                )));
            }
        }
        Ok(())
    }

    /// Closed plus side `M̄₊ = M₊ ∪ Σ`.
    pub fn closed_plus(&self) -> Vec<bool> {
        self.plus.iter().zip(&self.interface).map(|(p, i)| *p || *i).collect()
    }

    /// Per-node quadrature shares; interface nodes are split half/half so that
    /// `Plus + Minus = Full` node by node.
    pub fn quadrature_split(&self, side: Side) -> Vec<f64> {
        (0..self.plus.len())
            .map(|v| match side {
                Side::Full => 1.0,
                _ if self.interface[v] => 0.5,
                Side::Plus => f64::from(u8::from(self.plus[v])),
                Side::Minus => f64::from(u8::from(self.minus[v])),
            })
            .collect()
    }
}
