//! Triangle meshes in `H² × R`, stored in half-plane model coordinates `(x, y, t)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hyp::AmbientPoint;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("triangle {0} references a missing vertex")]
    IndexOutOfRange(usize),
    #[error("triangle {index} is degenerate (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("obj parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("mesh has no structured grid")]
    NoGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: String,
    pub resolution: (usize, usize),
}

/// Vertex `(i, j)` of a structured grid sits at index `i * nv + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh<T> {
    pub vertices: Vec<AmbientPoint<T>>,
    pub triangles: Vec<[usize; 3]>,
    pub grid: Option<(usize, usize)>,
    pub provenance: Provenance,
}

/// Area of a triangle measured with the metric frozen at its centroid.
pub fn triangle_area<T: Scalar>(p: &AmbientPoint<T>, q: &AmbientPoint<T>, r: &AmbientPoint<T>) -> T {
    let xc = (p.base.x() + q.base.x() + r.base.x()) / T::lit(3.0);
    let w = xc.recip();
    let e1 = [(q.base.x() - p.base.x()) * w, (q.base.y() - p.base.y()) * w, q.t - p.t];
    let e2 = [(r.base.x() - p.base.x()) * w, (r.base.y() - p.base.y()) * w, r.t - p.t];
    let cx = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    T::half() * (cx[0] * cx[0] + cx[1] * cx[1] + cx[2] * cx[2]).sqrt()
}

impl<T: Scalar> SurfaceMesh<T> {
    /// Triangulate an `nu × nv` grid of vertices given row by row.
    pub fn from_grid(vertices: Vec<AmbientPoint<T>>, nu: usize, nv: usize, family: &str) -> Self {
        assert_eq!(vertices.len(), nu * nv, "grid size mismatch");
        let mut triangles = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
        for i in 0..nu - 1 {
            for j in 0..nv - 1 {
                let k = i * nv + j;
                triangles.push([k, k + nv, k + 1]);
                triangles.push([k + 1, k + nv, k + nv + 1]);
            }
        }
        Self {
            vertices,
            triangles,
            grid: Some((nu, nv)),
            provenance: Provenance {
                family: family.into(),
                resolution: (nu, nv),
            },
        }
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.vertices.len();
        for (k, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|i| *i >= n) {
                return Err(MeshError::IndexOutOfRange(k));
            }
            let a = triangle_area(&self.vertices[tri[0]], &self.vertices[tri[1]], &self.vertices[tri[2]]);
            if !(a > T::lit(1e-14)) {
                return Err(MeshError::DegenerateTriangle { index: k, area: a.as_f64() });
            }
        }
        Ok(())
    }

    pub fn vertex(&self, i: usize, j: usize) -> Result<&AmbientPoint<T>, MeshError> {
        let (_, nv) = self.grid.ok_or(MeshError::NoGrid)?;
        Ok(&self.vertices[i * nv + j])
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# half-plane model coordinates: x (height) y (boundary) t");
        let _ = writeln!(s, "# family {}", self.provenance.family);
        if let Some((nu, nv)) = self.grid {
            let _ = writeln!(s, "# grid {nu} {nv}");
        }
        for v in &self.vertices {
            let _ = writeln!(s, "v {:e} {:e} {:e}", v.base.x().as_f64(), v.base.y().as_f64(), v.t.as_f64());
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        s
    }

    pub fn from_obj(src: &str) -> Result<Self, MeshError> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut grid = None;
        let mut family = String::from("obj");
        for (ln, line) in src.lines().enumerate() {
            let err = |msg: &str| MeshError::Parse {
                line: ln + 1,
                msg: msg.into(),
            };
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let c: Vec<f64> = it.map(|w| w.parse::<f64>()).collect::<Result<_, _>>().map_err(|e| err(&e.to_string()))?;
                    if c.len() < 3 {
                        return Err(err("vertex needs three coordinates"));
                    }
                    let p = AmbientPoint::new(T::lit(c[0]), T::lit(c[1]), T::lit(c[2])).map_err(|e| err(&e.to_string()))?;
                    vertices.push(p);
                }
                Some("f") => {
                    let idx: Vec<usize> = it
                        .map(|w| w.split('/').next().unwrap_or("").parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| err(&e.to_string()))?;
                    if idx.len() != 3 || idx.contains(&0) {
                        return Err(err("only 1-based triangles are supported"));
                    }
                    triangles.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
                }
                Some("#") => {
                    let rest: Vec<&str> = it.collect();
                    match rest.as_slice() {
                        ["grid", nu, nv] => {
                            grid = Some((
                                nu.parse().map_err(|_| err("bad grid size"))?,
                                nv.parse().map_err(|_| err("bad grid size"))?,
                            ))
                        }
                        ["family", name @ ..] => family = name.join(" "),
                        _ => {}
                    }
                }
                _ => {}
            }
        }
        if let Some((nu, nv)) = grid {
            if nu * nv != vertices.len() {
                grid = None;
            }
        }
        let mesh = Self {
            provenance: Provenance {
                family,
                resolution: grid.unwrap_or((vertices.len(), 1)),
            },
            vertices,
            triangles,
            grid,
        };
        for (k, tri) in mesh.triangles.iter().enumerate() {
            if tri.iter().any(|i| *i >= mesh.vertices.len()) {
                return Err(MeshError::IndexOutOfRange(k));
            }
        }
        Ok(mesh)
    }

    /// Vertex table `x,y,t`.
    pub fn vertices_csv(&self) -> String {
        let mut s = String::from("x,y,t\n");
        for v in &self.vertices {
            let _ = writeln!(s, "{},{},{}", v.base.x(), v.base.y(), v.t);
        }
        s
    }

    /// Triangle table `i,j,k` (0-based).
    pub fn triangles_csv(&self) -> String {
        let mut s = String::from("i,j,k\n");
        for t in &self.triangles {
            let _ = writeln!(s, "{},{},{}", t[0], t[1], t[2]);
        }
        s
    }

    /// Apply a map to every vertex, keeping connectivity.
    pub fn map(&self, f: impl Fn(&AmbientPoint<T>) -> AmbientPoint<T>) -> Self {
        Self {
            vertices: self.vertices.iter().map(f).collect(),
            ..self.clone()
        }
    }
}
