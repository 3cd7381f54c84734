//! Text serialisation of fields and point samples (CSV and legacy VTK).
//!
//! Numbers are written with 17 significant digits so that a CSV written
//! and read back reproduces every `f64` exactly. Writers return strings;
//! file handling is left to the caller.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::embedding::EmbeddedSample;
use crate::error::{Error, Result};
use crate::pde::{GridDomain, ScalarField2D};
use crate::scalar::{to_f64, Real};

/// Fixed 17-significant-digit formatting.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with columns `x,y,<names…>`, one node per row, `x` fastest.
pub fn fields_to_csv<T: Real>(names: &[&str], fields: &[&ScalarField2D<T>]) -> Result<String> {
    if names.len() != fields.len() || fields.is_empty() {
        return Err(Error::InvalidInput("one name per field required".into()));
    }
    let d = *fields[0].domain();
    if fields.iter().any(|f| *f.domain() != d) {
        return Err(Error::DomainMismatch);
    }
    let mut out = String::from("x,y");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for j in 0..d.ny() {
        for i in 0..d.nx() {
            out.push_str(&fmt_num(to_f64(d.x(i))));
            out.push(',');
            out.push_str(&fmt_num(to_f64(d.y(j))));
            for f in fields {
                out.push(',');
                out.push_str(&fmt_num(to_f64(f.at(i, j))));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Columns read back from a field CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTable {
    pub names: Vec<String>,
    pub fields: Vec<ScalarField2D<f64>>,
}

impl FieldTable {
    pub fn get(&self, name: &str) -> Option<&ScalarField2D<f64>> {
        self.names.iter().position(|n| n == name).map(|k| &self.fields[k])
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    f64::from_str(tok.trim())
        .map_err(|_| Error::InvalidInput(format!("line {line}: cannot parse number '{}'", tok.trim())))
}

/// Parses a CSV written by [`fields_to_csv`], recovering the grid.
pub fn fields_from_csv(text: &str) -> Result<FieldTable> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty field file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "x" || cols[1] != "y" {
        return Err(Error::InvalidInput("line 1: header must start with x,y and name a value column".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); cols.len() - 2];
    for (k, line) in lines {
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != cols.len() {
            return Err(Error::InvalidInput(format!(
                "line {}: expected {} columns, found {}",
                k + 1,
                cols.len(),
                toks.len()
            )));
        }
        xs.push(parse_num(toks[0], k + 1)?);
        ys.push(parse_num(toks[1], k + 1)?);
        for (c, tok) in data.iter_mut().zip(&toks[2..]) {
            c.push(parse_num(tok, k + 1)?);
        }
    }
    let nx = ys.iter().take_while(|&&y| y == ys[0]).count();
    if nx == 0 || xs.len() % nx != 0 {
        return Err(Error::InvalidInput("rows do not form a rectangular grid".into()));
    }
    let ny = xs.len() / nx;
    let domain = GridDomain::new(xs[0], xs[nx - 1], ys[0], ys[xs.len() - 1], nx, ny)?;
    for j in 0..ny {
        for i in 0..nx {
            let r = j * nx + i;
            if xs[r] != domain.x(i) || ys[r] != domain.y(j) {
                return Err(Error::InvalidInput(format!(
                    "row {} does not match a uniform grid node",
                    r + 2
                )));
            }
        }
    }
    let fields = data
        .into_iter()
        .map(|values| ScalarField2D::new(domain, values))
        .collect::<Result<_>>()?;
    Ok(FieldTable {
        names: cols[2..].iter().map(|s| s.to_string()).collect(),
        fields,
    })
}

/// Legacy ASCII VTK structured grid with one scalar array per field.
pub fn fields_to_vtk<T: Real>(title: &str, names: &[&str], fields: &[&ScalarField2D<T>]) -> Result<String> {
    if names.len() != fields.len() || fields.is_empty() {
        return Err(Error::InvalidInput("one name per field required".into()));
    }
    let d = *fields[0].domain();
    if fields.iter().any(|f| *f.domain() != d) {
        return Err(Error::DomainMismatch);
    }
    let n = d.len();
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET STRUCTURED_GRID");
    let _ = writeln!(out, "DIMENSIONS {} {} 1\nPOINTS {n} double", d.nx(), d.ny());
    for j in 0..d.ny() {
        for i in 0..d.nx() {
            let _ = writeln!(out, "{} {} 0", fmt_num(to_f64(d.x(i))), fmt_num(to_f64(d.y(j))));
        }
    }
    let _ = writeln!(out, "POINT_DATA {n}");
    for (name, f) in names.iter().zip(fields) {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in f.values() {
            let _ = writeln!(out, "{}", fmt_num(to_f64(*v)));
        }
    }
    Ok(out)
}

/// Real or imaginary part of one complex coordinate `z_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coordinate {
    pub imaginary: bool,
    /// Zero-based index into `z`.
    pub index: usize,
}

impl Coordinate {
    pub fn eval<T: Real>(&self, s: &EmbeddedSample<T>) -> f64 {
        let z = s.z[self.index];
        to_f64(if self.imaginary { z.im } else { z.re })
    }

    pub fn label(&self) -> String {
        format!("{}:z{}", if self.imaginary { "im" } else { "re" }, self.index + 1)
    }
}

/// Three coordinates of ℝ^{2n} used to draw a point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projection(pub [Coordinate; 3]);

impl Projection {
    /// `re:zn, im:zn, re:z1`
    pub fn default_for(n: usize) -> Self {
        Self([
            Coordinate { imaginary: false, index: n - 1 },
            Coordinate { imaginary: true, index: n - 1 },
            Coordinate { imaginary: false, index: 0 },
        ])
    }

    /// Parses `"re:z3,im:z3,re:z1"` for dimension `n`.
    pub fn parse(spec: &str, n: usize) -> Result<Self> {
        let coords = spec
            .split(',')
            .map(|tok| parse_coordinate(tok.trim(), n))
            .collect::<Result<Vec<_>>>()?;
        let arr: [Coordinate; 3] = coords
            .try_into()
            .map_err(|v: Vec<_>| Error::InvalidInput(format!("projection needs 3 coordinates, got {}", v.len())))?;
        Ok(Self(arr))
    }

    pub fn apply<T: Real>(&self, s: &EmbeddedSample<T>) -> [f64; 3] {
        self.0.map(|c| c.eval(s))
    }
}

fn parse_coordinate(tok: &str, n: usize) -> Result<Coordinate> {
    let bad = || Error::InvalidInput(format!("unknown coordinate '{tok}' (expected re:zK or im:zK, 1 <= K <= {n})"));
    let (part, rest) = tok.split_once(':').ok_or_else(bad)?;
    let imaginary = match part {
        "re" => false,
        "im" => true,
        _ => return Err(bad()),
    };
    let k: usize = rest.strip_prefix('z').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if k == 0 || k > n {
        return Err(bad());
    }
    Ok(Coordinate { imaginary, index: k - 1 })
}

/// CSV of samples: reduced coordinates, torus angles, then `re_zk,im_zk`.
pub fn samples_to_csv<T: Real>(samples: &[EmbeddedSample<T>], n: usize) -> String {
    let mut out = String::from("x,y,u,v,w,theta_total");
    for k in 1..=n - 2 {
        let _ = write!(out, ",phi_{k}");
    }
    for k in 1..=n {
        let _ = write!(out, ",re_z{k},im_z{k}");
    }
    out.push('\n');
    for s in samples {
        let mut row: Vec<f64> = [s.x, s.y, s.u, s.v, s.w, s.theta_total].iter().map(|&t| to_f64(t)).collect();
        row.extend(s.torus_angles.iter().map(|&t| to_f64(t)));
        for z in &s.z {
            row.push(to_f64(z.re));
            row.push(to_f64(z.im));
        }
        let line: Vec<String> = row.into_iter().map(fmt_num).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Legacy ASCII VTK polydata of projected sample points.
pub fn samples_to_vtk<T: Real>(title: &str, samples: &[EmbeddedSample<T>], projection: &Projection) -> String {
    let n = samples.len();
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET POLYDATA");
    let _ = writeln!(out, "POINTS {n} double");
    for s in samples {
        let [a, b, c] = projection.apply(s);
        let _ = writeln!(out, "{} {} {}", fmt_num(a), fmt_num(b), fmt_num(c));
    }
    let _ = writeln!(out, "VERTICES {n} {}", 2 * n);
    for k in 0..n {
        let _ = writeln!(out, "1 {k}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::lift_point;
    use crate::params::ReductionParams;

    #[test]
    fn csv_round_trip_is_exact() {
        let d: GridDomain<f64> = GridDomain::new(-1.0, 0.7, 0.1, 2.3, 7, 5).unwrap();
        let f = ScalarField2D::from_fn(d, |x, y| (3.1 * x).sin() / (1.0 + y * y) + 1e-300);
        let g = ScalarField2D::from_fn(d, |x, y| x * y * std::f64::consts::PI);
        let text = fields_to_csv(&["f", "g"], &[&f, &g]).unwrap();
        let back = fields_from_csv(&text).unwrap();
        assert_eq!(back.names, vec!["f", "g"]);
        assert_eq!(back.get("f").unwrap(), &f);
        assert_eq!(back.get("g").unwrap(), &g);
        assert_eq!(fields_to_csv(&["f", "g"], &[&back.fields[0], &back.fields[1]]).unwrap(), text);
    }

    #[test]
    fn csv_errors() {
        assert!(fields_from_csv("").is_err());
        assert!(fields_from_csv("a,b,c\n").is_err());
        let e = fields_from_csv("x,y,value\n0,0,1\n1,0,oops\n").unwrap_err();
        assert!(e.to_string().contains("line 3"));
    }

    #[test]
    fn vtk_layout() {
        let d = GridDomain::square(0.0, 1.0, 3).unwrap();
        let f = ScalarField2D::from_fn(d, |x, _| x);
        let text = fields_to_vtk("t", &["f"], &[&f]).unwrap();
        assert!(text.contains("DIMENSIONS 3 3 1"));
        assert!(text.contains("POINT_DATA 9"));
        assert_eq!(text.lines().count(), 5 + 1 + 9 + 1 + 2 + 9);
    }

    #[test]
    fn projection_parsing() {
        let p = Projection::parse("re:z3,im:z3,re:z1", 3).unwrap();
        assert_eq!(p, Projection::default_for(3));
        assert!(Projection::parse("re:z9", 3).is_err());
        assert!(Projection::parse("re:z1,im:z1", 3).is_err());
        assert!(Projection::parse("abs:z1,re:z1,re:z2", 3).is_err());
        assert!(Projection::parse("re:z0,re:z1,re:z2", 3).is_err());
    }

    #[test]
    fn sample_outputs() {
        let p = ReductionParams::new(vec![1.0, -1.0]).unwrap();
        let s = lift_point(&p, 0.5, 0.25, 1.0, 2.0, &[0.3]).unwrap();
        let csv = samples_to_csv(std::slice::from_ref(&s), 3);
        let header = csv.lines().next().unwrap();
        assert_eq!(header, "x,y,u,v,w,theta_total,phi_1,re_z1,im_z1,re_z2,im_z2,re_z3,im_z3");
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 13);
        let vtk = samples_to_vtk("s", &[s], &Projection::default_for(3));
        assert!(vtk.contains("POINTS 1 double\n5.0000000000000000e-1 1.0000000000000000e0 "));
    }
}
