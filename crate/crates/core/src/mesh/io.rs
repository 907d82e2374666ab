//! Plain-text mesh format.
//!
//! ```text
//! vertices <V> triangles <T> interface_edges <E>
//! x y                  (V lines)
//! i j k label beta     (T lines, label MINUS or PLUS)
//! i j s_mid            (E lines, parameter order)
//! ```
//! Floats use Rust's shortest round-trip formatting.

use std::io::{self, Write};

use super::{FittedMesh, InterfaceTrace, Side};
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(mesh: &FittedMesh, trace: &InterfaceTrace, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "vertices {} triangles {} interface_edges {}",
        mesh.n_vertices(),
        mesh.n_triangles(),
        trace.edges.len()
    )?;
    for p in mesh.vertices() {
        writeln!(out, "{} {}", p[0], p[1])?;
    }
    for (k, t) in mesh.triangles().iter().enumerate() {
        writeln!(out, "{} {} {} {} {}", t[0], t[1], t[2], mesh.label(k).as_str(), mesh.beta(k))?;
    }
    for e in &trace.edges {
        writeln!(out, "{} {} {}", e.start, e.end, e.mid_param)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MeshFile {
    pub mesh: FittedMesh,
    pub interface_edges: Vec<(usize, usize, f64)>,
}

pub fn read_mesh(text: &str) -> Result<MeshFile> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let counts = match tokens.as_slice() {
        ["vertices", v, "triangles", t, "interface_edges", e] => {
            [*v, *t, *e].map(|s| s.parse::<usize>().ok())
        }
        _ => [None; 3],
    };
    let [Some(nv), Some(nt), Some(ne)] = counts else {
        return Err(Error::Parse {
            line: hline + 1,
            message: format!("malformed header '{header}'"),
        });
    };

    let mut next_fields = |expected: usize| -> Result<(usize, Vec<String>)> {
        let (i, l) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "unexpected end of file".into(),
        })?;
        let f: Vec<String> = l.split_whitespace().map(str::to_owned).collect();
        if f.len() != expected {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected {expected} fields, found {}", f.len()),
            });
        }
        Ok((i + 1, f))
    };
    fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
        s.parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse '{s}'"),
        })
    }

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, f) = next_fields(2)?;
        vertices.push([num(line, &f[0])?, num(line, &f[1])?]);
    }
    let mut triangles = Vec::with_capacity(nt);
    let mut labels = Vec::with_capacity(nt);
    let (mut beta_minus, mut beta_plus) = (None, None);
    for _ in 0..nt {
        let (line, f) = next_fields(5)?;
        triangles.push([num(line, &f[0])?, num(line, &f[1])?, num(line, &f[2])?]);
        let beta: f64 = num(line, &f[4])?;
        let (side, slot) = match f[3].as_str() {
            "MINUS" => (Side::Minus, &mut beta_minus),
            "PLUS" => (Side::Plus, &mut beta_plus),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown label '{other}'"),
                })
            }
        };
        match *slot {
            None => *slot = Some(beta),
            Some(b) if b != beta => {
                return Err(Error::Parse {
                    line,
                    message: format!("beta {beta} differs from {b} elsewhere in {}", side.as_str()),
                })
            }
            _ => {}
        }
        labels.push(side);
    }
    let mut interface_edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (line, f) = next_fields(3)?;
        interface_edges.push((num(line, &f[0])?, num(line, &f[1])?, num(line, &f[2])?));
    }
    let bm = beta_minus.or(beta_plus).unwrap_or(1.0);
    let bp = beta_plus.unwrap_or(bm);
    let mesh = FittedMesh::from_parts(vertices, triangles, labels, bm, bp)?;
    if mesh.interface_edge_count() != ne {
        return Err(Error::Parse {
            line: hline + 1,
            message: format!(
                "header declares {ne} interface edges but labels induce {}",
                mesh.interface_edge_count()
            ),
        });
    }
    Ok(MeshFile { mesh, interface_edges })
}
