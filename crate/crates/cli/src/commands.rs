use std::path::Path;

use num_complex::Complex64;
use qfourier::qcore::{q_exp, DeformationParameter, QError};
use qfourier::series::{
    gibbs_overshoot, linspace, one_sided_values, sample_std, PeriodicWindow, SeriesApproximation,
};
use qfourier::transform::{delta_sift, roundtrip_report, DensityFunction};

use crate::output::Table;
use crate::settings::{DensityKind, Settings};
use crate::CliError;

fn deformation(q: f64) -> Result<DeformationParameter, CliError> {
    Ok(DeformationParameter::new(q)?)
}

fn load_samples(path: &Path) -> Result<DensityFunction, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    })?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for record in reader.deserialize::<(f64, f64)>() {
        let (x, v) = record.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        xs.push(x);
        values.push(v);
    }
    Ok(DensityFunction::sampled(xs, values)?)
}

/// Gaussian `exp(-|x|^2)/pi^{d/2}`, the uniform density `(2/T)^d` on
/// `[-T/4, T/4]^d`, or samples from a file.
pub fn density(s: &Settings) -> Result<DensityFunction, CliError> {
    match s.density {
        DensityKind::Gaussian => Ok(DensityFunction::gaussian(s.d)?),
        DensityKind::Uniform => Ok(DensityFunction::uniform(s.d, s.period / 4.0)?),
        DensityKind::Sampled => {
            if s.d != 1 {
                return Err(CliError::Usage(
                    "sampled densities are one-dimensional".into(),
                ));
            }
            let path = s
                .samples
                .as_deref()
                .ok_or_else(|| CliError::Usage("--density sampled needs --samples".into()))?;
            load_samples(path)
        }
    }
}

pub fn qexp(s: &Settings, z: Option<Complex64>, extent: f64) -> Result<Table, CliError> {
    let p = deformation(s.single_q()?)?;
    let points: Vec<Complex64> = match z {
        Some(z) => vec![z],
        None => {
            let axis = linspace(-extent, extent, s.grid);
            axis.iter()
                .flat_map(|&im| axis.iter().map(move |&re| Complex64::new(re, im)))
                .collect()
        }
    };
    let mut table = Table::new(&["re", "im", "modulus", "arg", "flag"]);
    for z in points {
        let (value, flag) = match q_exp(p, z) {
            Ok(v) if v.on_branch_cut => (v.value, "cut"),
            Ok(v) => (v.value, "ok"),
            Err(QError::Pole(_)) => (Complex64::new(f64::NAN, f64::NAN), "pole"),
            Err(QError::Overflow(_)) => (Complex64::new(f64::NAN, f64::NAN), "overflow"),
            Err(e) => return Err(e.into()),
        };
        table.push(vec![
            z.re.into(),
            z.im.into(),
            value.norm().into(),
            value.arg().into(),
            flag.into(),
        ]);
    }
    Ok(table)
}

pub fn delta_check(s: &Settings) -> Result<Table, CliError> {
    let p = deformation(s.single_q()?)?;
    if s.density != DensityKind::Gaussian {
        return Err(CliError::Usage(
            "the sifting check needs a rapidly decreasing test function; use gaussian".into(),
        ));
    }
    let phi = density(s)?;
    let r = delta_sift(&phi, p, &s.quadrature)?;
    if !r.converged {
        return Err(CliError::NonConvergence(format!(
            "sift value {} with error estimate {:e}",
            r.sift_value, r.error_estimate
        )));
    }
    let mut table = Table::new(&[
        "q",
        "d",
        "test_function",
        "sift_value",
        "reference",
        "relative_error",
        "error_estimate",
    ]);
    table.push(vec![
        r.q.into(),
        r.d.into(),
        r.test_function.into(),
        r.sift_value.into(),
        r.reference.into(),
        r.relative_error.into(),
        r.error_estimate.into(),
    ]);
    Ok(table)
}

/// `x1,x2;y1,y2;...`; in one dimension `-1,0,1` also works.
pub fn parse_points(text: &str, d: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let groups: Vec<&str> = if d == 1 && !text.contains(';') {
        text.split(',').collect()
    } else {
        text.split(';').collect()
    };
    groups
        .iter()
        .map(|g| {
            let coords = g
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("bad coordinate {c:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if coords.len() != d {
                return Err(CliError::Usage(format!(
                    "point {g:?} has {} coordinates, expected {d}",
                    coords.len()
                )));
            }
            Ok(coords)
        })
        .collect()
}

fn default_points(s: &Settings) -> Vec<Vec<f64>> {
    match (s.density, s.d) {
        (DensityKind::Gaussian, 1) => vec![vec![-1.0], vec![0.0], vec![1.0]],
        (DensityKind::Uniform, 1) => {
            let h = s.period / 8.0;
            vec![vec![-h], vec![0.0], vec![h]]
        }
        (_, d) => vec![vec![0.0; d]],
    }
}

pub fn roundtrip(s: &Settings, points: Option<&str>) -> Result<Table, CliError> {
    let p = deformation(s.single_q()?)?;
    let f = density(s)?;
    let points = match points {
        Some(text) => parse_points(text, s.d)?,
        None if s.density == DensityKind::Sampled => {
            return Err(CliError::Usage("sampled densities need --points".into()))
        }
        None => default_points(s),
    };
    let report = roundtrip_report(&f, p, &points, &s.quadrature)?;
    if let Some(bad) = report.points.iter().find(|r| !r.converged) {
        return Err(CliError::NonConvergence(format!(
            "inversion at {:?} missed its tolerance",
            bad.x
        )));
    }
    let mut table = Table::new(&[
        "q",
        "d",
        "x1",
        "x2",
        "x3",
        "recovered",
        "reference",
        "relative_error",
    ]);
    for r in report.points {
        let coord = |i: usize| r.x.get(i).copied().unwrap_or(f64::NAN);
        table.push(vec![
            p.q().into(),
            s.d.into(),
            coord(0).into(),
            coord(1).into(),
            coord(2).into(),
            r.recovered.into(),
            r.reference.into(),
            r.relative_error.into(),
        ]);
    }
    Ok(table)
}

fn series_for(s: &Settings, q: f64, f: &DensityFunction) -> Result<SeriesApproximation, CliError> {
    let window = PeriodicWindow::new(s.period)?;
    Ok(
        SeriesApproximation::new(deformation(q)?, s.n_terms, window, f, s.quadrature.clone())?
            .with_clamp_negative(s.clamp_negative),
    )
}

fn one_dimensional(s: &Settings) -> Result<(), CliError> {
    if s.d != 1 {
        return Err(CliError::Usage(
            "series are one-dimensional; use --d 1".into(),
        ));
    }
    Ok(())
}

pub fn series(s: &Settings) -> Result<Table, CliError> {
    one_dimensional(s)?;
    let f = density(s)?;
    let mut table = Table::new(&["q", "x", "s_n", "density", "abs_error"]);
    for &q in &s.q {
        let approx = series_for(s, q, &f)?;
        let xs = approx.window().grid(s.grid);
        let values = approx.eval_grid(&xs)?;
        for (x, v) in xs.into_iter().zip(values) {
            let truth = approx.density().value(&[x]);
            table.push(vec![
                q.into(),
                x.into(),
                v.into(),
                truth.into(),
                (v - truth).abs().into(),
            ]);
        }
    }
    Ok(table)
}

pub fn gibbs(s: &Settings, jump: Option<f64>, width: Option<f64>) -> Result<Table, CliError> {
    one_dimensional(s)?;
    let f = density(s)?;
    let jump = jump.unwrap_or(s.period / 4.0);
    let (left, right) = one_sided_values(&f, jump).ok_or_else(|| {
        CliError::Usage(format!(
            "the {} density has no jump at x = {jump}",
            f.name()
        ))
    })?;
    let jump_size = (left - right).abs();
    // interior band [-0.2 T, 0.2 T], i.e. [-0.8, 0.8] for T = 4
    let interior = linspace(-0.2 * s.period, 0.2 * s.period, 161);
    let mut table = Table::new(&[
        "q",
        "n_terms",
        "jump_location",
        "jump_size",
        "overshoot_fraction",
        "half_width",
        "peak_location",
        "interior_std",
    ]);
    for &q in &s.q {
        let approx = series_for(s, q, &f)?;
        let r = gibbs_overshoot(&approx, &f, jump, jump_size, width, s.grid)?;
        let spread = sample_std(&approx.eval_grid(&interior)?);
        table.push(vec![
            r.q.into(),
            r.n_terms.into(),
            r.jump_location.into(),
            r.jump_size.into(),
            r.overshoot_fraction.into(),
            r.half_width.into(),
            r.peak_location.into(),
            spread.into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse_in_both_layouts() {
        assert_eq!(
            parse_points("-1,0,1", 1).unwrap(),
            vec![vec![-1.0], vec![0.0], vec![1.0]]
        );
        assert_eq!(
            parse_points("0,0;1,-1", 2).unwrap(),
            vec![vec![0.0, 0.0], vec![1.0, -1.0]]
        );
        assert!(parse_points("0,0,1", 2).is_err());
        assert!(parse_points("a", 1).is_err());
    }
}
