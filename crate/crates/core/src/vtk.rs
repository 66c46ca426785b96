//! Legacy ASCII VTK output of cellwise fields.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{FemError, Result};
use crate::mesh::SimplicialMesh;
use crate::problem::{Solution, StokesProblem};

#[derive(Debug, Clone, PartialEq)]
pub enum CellField {
    Scalar(String, Vec<f64>),
    Vector(String, Vec<[f64; 3]>),
}

impl CellField {
    pub fn name(&self) -> &str {
        match self {
            CellField::Scalar(n, _) | CellField::Vector(n, _) => n,
        }
    }

    fn len(&self) -> usize {
        match self {
            CellField::Scalar(_, v) => v.len(),
            CellField::Vector(_, v) => v.len(),
        }
    }
}

/// Renders an unstructured grid with CELL_DATA arrays.
pub fn vtk_string(mesh: &SimplicialMesh, fields: &[CellField]) -> Result<String> {
    let nc = mesh.n_cells();
    for f in fields {
        if f.len() != nc {
            return Err(FemError::DimensionMismatch {
                what: "cell field length",
                expected: nc,
                got: f.len(),
            });
        }
        if f.name().is_empty() || f.name().contains(char::is_whitespace) {
            return Err(FemError::InvalidConfig(format!(
                "bad VTK array name {:?}",
                f.name()
            )));
        }
    }
    let nv = mesh.dim() + 1;
    let cell_type = if mesh.dim() == 2 { 5 } else { 10 };
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\nmvmfem\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.n_vertices());
    for x in mesh.vertices() {
        let _ = writeln!(s, "{:e} {:e} {:e}", x[0], x[1], x[2]);
    }
    let _ = writeln!(s, "CELLS {} {}", nc, nc * (nv + 1));
    for c in 0..nc {
        let ids: Vec<String> = mesh.cell(c).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{} {}", nv, ids.join(" "));
    }
    let _ = writeln!(s, "CELL_TYPES {nc}");
    for _ in 0..nc {
        let _ = writeln!(s, "{cell_type}");
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "CELL_DATA {nc}");
    }
    for f in fields {
        match f {
            CellField::Scalar(name, v) => {
                let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                for x in v {
                    let _ = writeln!(s, "{x:e}");
                }
            }
            CellField::Vector(name, v) => {
                let _ = writeln!(s, "VECTORS {name} double");
                for x in v {
                    let _ = writeln!(s, "{:e} {:e} {:e}", x[0], x[1], x[2]);
                }
            }
        }
    }
    Ok(s)
}

pub fn export_vtk(mesh: &SimplicialMesh, fields: &[CellField], path: &Path) -> Result<()> {
    let s = vtk_string(mesh, fields)?;
    std::fs::write(path, s).map_err(|e| FemError::io(path, e))
}

/// `p_h`, `|div q_h|` and the cell average of `q_h` (its centroid value).
pub fn solution_fields(problem: &StokesProblem, sol: &Solution) -> Vec<CellField> {
    let mesh = &problem.mesh;
    let w = 1.0 / (mesh.dim() + 1) as f64;
    let centre = [w, w, w, if mesh.dim() == 3 { w } else { 0.0 }];
    let div = problem.space_q.cell_differentials(&sol.q);
    let q_avg = (0..mesh.n_cells())
        .map(|c| problem.space_q.evaluate(&sol.q, c, &centre).0)
        .collect();
    vec![
        CellField::Scalar("p_h".into(), sol.p.clone()),
        CellField::Scalar(
            "div_q_h_abs".into(),
            div.iter().map(|d| d[0].abs()).collect(),
        ),
        CellField::Vector("q_h".into(), q_avg),
    ]
}

/// Contents of a file written by [`export_vtk`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkData {
    pub points: Vec<[f64; 3]>,
    pub cells: Vec<Vec<usize>>,
    pub cell_types: Vec<u8>,
    pub fields: Vec<CellField>,
}

/// Minimal reader for the subset of the legacy format written here.
pub fn parse_vtk(text: &str) -> Result<VtkData> {
    let bad = |m: &str| FemError::InvalidConfig(format!("malformed VTK: {m}"));
    let mut tok = text.lines().skip(4).flat_map(|l| l.split_whitespace());
    let mut next = || tok.next().ok_or_else(|| bad("unexpected end"));
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad(s));
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad(s));

    if next()? != "POINTS" {
        return Err(bad("POINTS"));
    }
    let np = int(next()?)?;
    next()?;
    let mut points = Vec::with_capacity(np);
    for _ in 0..np {
        points.push([num(next()?)?, num(next()?)?, num(next()?)?]);
    }
    if next()? != "CELLS" {
        return Err(bad("CELLS"));
    }
    let nc = int(next()?)?;
    next()?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let k = int(next()?)?;
        cells.push((0..k).map(|_| int(next()?)).collect::<Result<Vec<_>>>()?);
    }
    if next()? != "CELL_TYPES" {
        return Err(bad("CELL_TYPES"));
    }
    int(next()?)?;
    let cell_types = (0..nc)
        .map(|_| next().and_then(|t| t.parse::<u8>().map_err(|_| bad(t))))
        .collect::<Result<Vec<_>>>()?;
    let mut fields = Vec::new();
    while let Ok(t) = next() {
        match t {
            "CELL_DATA" => {
                int(next()?)?;
            }
            "SCALARS" => {
                let name = next()?.to_string();
                next()?;
                next()?;
                next()?;
                next()?;
                let v = (0..nc).map(|_| num(next()?)).collect::<Result<Vec<_>>>()?;
                fields.push(CellField::Scalar(name, v));
            }
            "VECTORS" => {
                let name = next()?.to_string();
                next()?;
                let mut v = Vec::with_capacity(nc);
                for _ in 0..nc {
                    v.push([num(next()?)?, num(next()?)?, num(next()?)?]);
                }
                fields.push(CellField::Vector(name, v));
            }
            other => return Err(bad(other)),
        }
    }
    Ok(VtkData {
        points,
        cells,
        cell_types,
        fields,
    })
}
