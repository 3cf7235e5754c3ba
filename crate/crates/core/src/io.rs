//! Text artifacts: coefficient files, sampled signals, operators, kernel
//! matrices and plot slices. Every file starts with one `#`-prefixed JSON
//! header line followed by a CSV table. Floats are written in shortest
//! round-trip form, so reading a file back reproduces the values exactly.

use std::collections::BTreeMap;

use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SdwtError};
use crate::fock::FockOperator;
use crate::kernel::LensFresnelKernel;
use crate::model::{Axis, CoefficientField, Grid3D, ParamCoords, QuadratureMeta, SampledField, C64};

pub const COEFFICIENT_COLUMNS: [&str; 10] = [
    "mu", "phi", "theta", "kappa_re", "kappa_im", "a", "b", "W_re", "W_im", "err_est",
];

/// Columns a plot slice may use as axes.
pub const SLICE_AXES: [&str; 7] = ["mu", "phi", "theta", "kappa_re", "kappa_im", "a", "b"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientHeader {
    pub meta: QuadratureMeta,
    pub wavelet: String,
    pub seed: u64,
}

fn header_line<T: Serialize>(h: &T) -> String {
    format!("# {}\n", serde_json::to_string(h).expect("header serializes"))
}

fn split_header(text: &str) -> Result<(&str, std::str::Lines<'_>)> {
    let mut lines = text.lines();
    let first = lines.next().ok_or_else(|| SdwtError::Parse("empty file".into()))?;
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| SdwtError::Parse("missing JSON header line".into()))?;
    Ok((json, lines))
}

fn expect_columns(line: Option<&str>, want: &[&str]) -> Result<()> {
    let got = line.ok_or_else(|| SdwtError::Parse("missing column row".into()))?;
    if got.split(',').ne(want.iter().copied()) {
        return Err(SdwtError::Parse(format!("unexpected columns {got:?}")));
    }
    Ok(())
}

fn parse_row(line: &str, n: usize, row: usize) -> Result<Vec<f64>> {
    let vals = line
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| SdwtError::Parse(format!("row {row}: {e}")))?;
    if vals.len() != n {
        return Err(SdwtError::Parse(format!(
            "row {row}: {} fields, expected {n}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn push_row(out: &mut String, vals: &[f64]) {
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&v.to_string());
    }
    out.push('\n');
}

pub fn write_coefficients(field: &CoefficientField, header: &CoefficientHeader) -> String {
    let mut out = header_line(header);
    out.push_str(&COEFFICIENT_COLUMNS.join(","));
    out.push('\n');
    for ((c, v), e) in field.coords.iter().zip(&field.values).zip(&field.err_est) {
        push_row(
            &mut out,
            &[c.mu, c.phi, c.theta, c.kappa.re, c.kappa.im, c.a, c.b, v.re, v.im, *e],
        );
    }
    out
}

pub fn read_coefficients(text: &str) -> Result<(CoefficientField, CoefficientHeader)> {
    let (json, mut lines) = split_header(text)?;
    let header: CoefficientHeader = serde_json::from_str(json)?;
    expect_columns(lines.next(), &COEFFICIENT_COLUMNS)?;
    let mut coords = Vec::new();
    let mut values = Vec::new();
    let mut err = Vec::new();
    for (row, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let v = parse_row(line, COEFFICIENT_COLUMNS.len(), row)?;
        coords.push(ParamCoords {
            mu: v[0],
            phi: v[1],
            theta: v[2],
            kappa: C64::new(v[3], v[4]),
            a: v[5],
            b: v[6],
        });
        values.push(C64::new(v[7], v[8]));
        err.push(v[9]);
    }
    let field = CoefficientField::new(coords, values, err, header.meta.clone())?;
    Ok((field, header))
}

const FIELD_COLUMNS: [&str; 5] = ["alpha_re", "alpha_im", "x", "re", "im"];

/// Sampled signal: grid in the header, one row per node in storage order.
pub fn write_field(f: &SampledField) -> String {
    let mut out = header_line(&f.grid);
    out.push_str(&FIELD_COLUMNS.join(","));
    out.push('\n');
    for ((i, j, k), v) in f.values.indexed_iter() {
        let a = f.grid.alpha(i, j);
        push_row(&mut out, &[a.re, a.im, f.grid.x.node(k), v.re, v.im]);
    }
    out
}

pub fn read_field(text: &str) -> Result<SampledField> {
    let (json, mut lines) = split_header(text)?;
    let grid: Grid3D = serde_json::from_str(json)?;
    expect_columns(lines.next(), &FIELD_COLUMNS)?;
    let mut vals = Vec::with_capacity(grid.len());
    for (row, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let v = parse_row(line, FIELD_COLUMNS.len(), row)?;
        vals.push(C64::new(v[3], v[4]));
    }
    if vals.len() != grid.len() {
        return Err(SdwtError::ShapeMismatch {
            expected: grid.len(),
            found: vals.len(),
        });
    }
    SampledField::new(
        grid,
        Array3::from_shape_vec(grid.shape(), vals).expect("length checked"),
    )
}

/// Nonzero entries of an operator as `(row, col, re, im)` on flat indices.
pub fn write_operator(op: &FockOperator) -> String {
    let mut out = header_line(&op.space);
    out.push_str("row,col,re,im\n");
    for ((i, j), v) in op.matrix.indexed_iter() {
        if *v != C64::new(0.0, 0.0) {
            out.push_str(&format!("{i},{j},{},{}\n", v.re, v.im));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelHeader {
    pub kernel: LensFresnelKernel,
    pub axis: Axis,
}

/// Sampled kernel as `(eta1, eta1p, re, im)` rows.
pub fn write_kernel(k: &LensFresnelKernel, axis: &Axis, values: &Array2<C64>) -> String {
    let mut out = header_line(&KernelHeader {
        kernel: k.clone(),
        axis: *axis,
    });
    out.push_str("eta1,eta1p,re,im\n");
    for ((i, j), v) in values.indexed_iter() {
        push_row(&mut out, &[axis.node(i), axis.node(j), v.re, v.im]);
    }
    out
}

/// Two coordinate columns spanning a plot; every other coordinate is held
/// at the value given in `fixed`, or at its value in the first row.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub x: String,
    pub y: String,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
}

impl SliceSpec {
    /// Parses `x,y[,name=value...]`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut parts = s.split(',');
        let x = parts.next().unwrap_or_default().trim().to_string();
        let y = parts
            .next()
            .ok_or_else(|| SdwtError::BadSlice(format!("{s:?}: need two axes")))?
            .trim()
            .to_string();
        let mut fixed = BTreeMap::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| SdwtError::BadSlice(format!("{p:?} is not name=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| SdwtError::BadSlice(format!("{p:?}: value is not a number")))?;
            fixed.insert(k.trim().to_string(), v);
        }
        Ok(SliceSpec { x, y, fixed })
    }
}

fn coord(c: &ParamCoords, name: &str) -> f64 {
    match name {
        "mu" => c.mu,
        "phi" => c.phi,
        "theta" => c.theta,
        "kappa_re" => c.kappa.re,
        "kappa_im" => c.kappa.im,
        "a" => c.a,
        "b" => c.b,
        _ => unreachable!("validated slice axis"),
    }
}

/// `(x, y, |W|, arg W)` rows for the points of `field` on the slice.
pub fn plot_slice(field: &CoefficientField, spec: &SliceSpec) -> Result<String> {
    for name in [&spec.x, &spec.y].into_iter().chain(spec.fixed.keys()) {
        if !SLICE_AXES.contains(&name.as_str()) {
            return Err(SdwtError::BadSlice(format!("{name:?} is not a coefficient axis")));
        }
    }
    if spec.x == spec.y {
        return Err(SdwtError::BadSlice("the two slice axes must differ".into()));
    }
    if spec.fixed.contains_key(&spec.x) || spec.fixed.contains_key(&spec.y) {
        return Err(SdwtError::BadSlice("a slice axis cannot also be fixed".into()));
    }
    let mut out = format!("{},{},abs_W,arg_W\n", spec.x, spec.y);
    let Some(first) = field.coords.first() else {
        return Ok(out);
    };
    let held: Vec<(&str, f64)> = SLICE_AXES
        .iter()
        .filter(|n| **n != spec.x && **n != spec.y)
        .map(|n| (*n, spec.fixed.get(*n).copied().unwrap_or_else(|| coord(first, n))))
        .collect();
    for (c, v) in field.coords.iter().zip(&field.values) {
        let on_slice = held
            .iter()
            .all(|(n, want)| (coord(c, n) - want).abs() <= 1e-12 * (1.0 + want.abs()));
        if on_slice {
            push_row(&mut out, &[coord(c, &spec.x), coord(c, &spec.y), v.norm(), v.arg()]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ParameterSampling;
    use crate::fock::FockSpace;
    use crate::kernel::{sample_kernel, ABCDMatrix};
    use crate::model::PRINCIPAL_BRANCH;
    use crate::quadrature::Rule;

    fn small_field() -> CoefficientField {
        let grid = Grid3D::centered(2.0, 4, 2.0, 4).unwrap();
        let mut s = ParameterSampling::singleton(0.3, 0.1, 0.0, C64::new(0.0, 0.0), 1.0, 0.0);
        s.a = Rule {
            nodes: vec![0.5, 1.0, 2.0],
            weights: vec![1.0; 3],
        };
        s.b = Rule {
            nodes: vec![-1.0, 0.0, 1.0 / 3.0],
            weights: vec![1.0; 3],
        };
        let coords = s.coords();
        let values: Vec<C64> = coords.iter().map(|c| C64::new(c.a * 0.1, -c.b / 7.0)).collect();
        let n = coords.len();
        CoefficientField::new(
            coords,
            values,
            vec![1e-17; n],
            QuadratureMeta {
                grid,
                tolerance: 1e-4,
                method: "fourier".into(),
                sqrt_branch: PRINCIPAL_BRANCH.into(),
                sampling: Some(s),
            },
        )
        .unwrap()
    }

    fn header(field: &CoefficientField) -> CoefficientHeader {
        CoefficientHeader {
            meta: field.meta.clone(),
            wavelet: "w".into(),
            seed: 3,
        }
    }

    #[test]
    fn coefficients_round_trip_exactly() {
        let f = small_field();
        let text = write_coefficients(&f, &header(&f));
        assert_eq!(text.lines().count(), 2 + f.len());
        let (back, h) = read_coefficients(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(h.seed, 3);
        assert_eq!(write_coefficients(&back, &h), text);
        assert!(read_coefficients("mu,phi\n").is_err());
        let broken = text.replacen("W_re", "Wre", 1);
        assert!(read_coefficients(&broken).is_err());
    }

    #[test]
    fn field_round_trip() {
        let grid = Grid3D::centered(1.0, 3, 1.0, 2).unwrap();
        let f = SampledField::from_fn(grid, |a, x| C64::new(a.re + x / 3.0, a.im * 0.1));
        let back = read_field(&write_field(&f)).unwrap();
        assert_eq!(back, f);
        let short: String = write_field(&f).lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(read_field(&short), Err(SdwtError::ShapeMismatch { .. })));
    }

    #[test]
    fn slices() {
        let f = small_field();
        let text = plot_slice(&f, &SliceSpec::parse("a,b").unwrap()).unwrap();
        assert_eq!(text.lines().count(), 1 + 9);
        for line in text.lines().skip(1) {
            let abs: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
            assert!(abs >= 0.0);
        }
        let fixed = plot_slice(&f, &SliceSpec::parse("mu,b,a=2").unwrap()).unwrap();
        assert_eq!(fixed.lines().count(), 1 + 3);
        assert!(matches!(
            plot_slice(&f, &SliceSpec::parse("a,zeta").unwrap()),
            Err(SdwtError::BadSlice(_))
        ));
        assert!(matches!(SliceSpec::parse("a"), Err(SdwtError::BadSlice(_))));
        let empty = CoefficientField {
            coords: vec![],
            values: vec![],
            err_est: vec![],
            meta: f.meta.clone(),
        };
        assert_eq!(
            plot_slice(&empty, &SliceSpec::parse("a,b").unwrap()).unwrap(),
            "a,b,abs_W,arg_W\n"
        );
    }

    #[test]
    fn operator_and_kernel_exports() {
        let sp = FockSpace::new(2).unwrap();
        let text = write_operator(&FockOperator::identity(sp));
        assert_eq!(text.lines().count(), 2 + 9);
        assert!(text.lines().nth(2).unwrap() == "0,0,1,0");
        let k = LensFresnelKernel::new(ABCDMatrix::new(1.0, 1.0, 0.0, 1.0).unwrap(), 1.0).unwrap();
        let axis = Axis::symmetric(0.0, 1.0, 3).unwrap();
        let text = write_kernel(&k, &axis, &sample_kernel(&k, &axis).unwrap());
        assert_eq!(text.lines().count(), 2 + 9);
        let h: KernelHeader = serde_json::from_str(text.lines().next().unwrap().strip_prefix("# ").unwrap()).unwrap();
        assert_eq!(h.kernel, k);
    }
}
