//! Field dumps: little-endian binary arrays behind a plain-text header,
//! plus CSV slices for 1D/2D cuts. Same config + seed reproduces these
//! byte-identically.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

use gauduchon_core::forms::Form11;
use gauduchon_core::grid::ScalarField;

/// Header + raw little-endian f64 payload. `dtype` is `f64` (one value per
/// point) or `c128` (interleaved re,im pairs).
fn write_dump(
    path: &Path,
    name: &str,
    dtype: &str,
    n: usize,
    res: usize,
    period: f64,
    count: usize,
    payload: impl Iterator<Item = f64>,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    writeln!(out, "gauduchon-field-dump v1")?;
    writeln!(out, "name: {name}")?;
    writeln!(out, "dtype: {dtype}")?;
    writeln!(out, "n: {n}")?;
    writeln!(out, "res: {res}")?;
    writeln!(out, "period: {period}")?;
    writeln!(out, "axis_order: x1..x{} row-major (x1 slowest)", 2 * n)?;
    writeln!(out, "count: {count}")?;
    writeln!(out)?;
    for v in payload {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Dump the real part of a scalar field (the library carries real
/// quantities with zero imaginary part).
pub fn dump_scalar(dir: &Path, name: &str, field: &ScalarField) -> Result<()> {
    let grid = field.grid();
    write_dump(
        &dir.join(format!("{name}.f64")),
        name,
        "f64",
        grid.dim(),
        grid.res(),
        grid.period(),
        grid.num_points(),
        field.values().iter().map(|c| c.re),
    )?;
    write_scalar_slices(dir, name, field)
}

/// Dump a matrix-valued (1,1)-form: point-major, row-major n×n complex
/// entries per point.
pub fn dump_form11(dir: &Path, name: &str, form: &Form11) -> Result<()> {
    let grid = form.grid();
    let count = grid.num_points() * grid.dim() * grid.dim();
    write_dump(
        &dir.join(format!("{name}.c128")),
        name,
        "c128",
        grid.dim(),
        grid.res(),
        grid.period(),
        count,
        form.data().iter().flat_map(|c| [c.re, c.im]),
    )
}

/// 1D cut along x¹ (other axes 0) and 2D cut over (x¹, x²), as CSV.
fn write_scalar_slices(dir: &Path, name: &str, field: &ScalarField) -> Result<()> {
    let grid = field.grid();
    let res = grid.res();
    let axes = grid.axes();
    let h = grid.period() / res as f64;

    let path1 = dir.join(format!("{name}_slice_x1.csv"));
    let mut csv = String::from("x1,re,im\n");
    let mut digits = vec![0usize; axes];
    for m in 0..res {
        digits[0] = m;
        let v = field.values()[grid.index_of(&digits)];
        csv.push_str(&format!("{},{:.17e},{:.17e}\n", m as f64 * h, v.re, v.im));
    }
    std::fs::write(&path1, csv).with_context(|| format!("writing {}", path1.display()))?;

    let path2 = dir.join(format!("{name}_slice_x1x2.csv"));
    let mut csv = String::from("x1,x2,re,im\n");
    let mut digits = vec![0usize; axes];
    for m1 in 0..res {
        for m2 in 0..res {
            digits[0] = m1;
            digits[1] = m2;
            let v = field.values()[grid.index_of(&digits)];
            csv.push_str(&format!(
                "{},{},{:.17e},{:.17e}\n",
                m1 as f64 * h,
                m2 as f64 * h,
                v.re,
                v.im
            ));
        }
    }
    std::fs::write(&path2, csv).with_context(|| format!("writing {}", path2.display()))?;
    Ok(())
}

/// Plot-ready convergence curve: one row per Newton iteration.
pub fn dump_convergence(dir: &Path, history: &[(f64, usize, f64)]) -> Result<()> {
    let path = dir.join("convergence.csv");
    let mut csv = String::from("t,newton_iter,residual_sup\n");
    for (t, iter, norm) in history {
        csv.push_str(&format!("{t},{iter},{norm:.17e}\n"));
    }
    std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use gauduchon_core::grid::TorusGrid;
    use num_complex::Complex64;

    #[test]
    fn dump_is_deterministic_and_parses_header() {
        let dir = std::env::temp_dir().join("gauduchon-dump-test");
        std::fs::create_dir_all(&dir).unwrap();
        let grid = TorusGrid::new(2, 4).unwrap();
        let f = ScalarField::from_fn(grid, |x| Complex64::new(x[0] + 2.0 * x[1], 0.0));
        dump_scalar(&dir, "probe", &f).unwrap();
        let a = std::fs::read(dir.join("probe.f64")).unwrap();
        dump_scalar(&dir, "probe", &f).unwrap();
        let b = std::fs::read(dir.join("probe.f64")).unwrap();
        assert_eq!(a, b, "byte-identical rewrite");

        let text_end = a.windows(2).position(|w| w == b"\n\n").unwrap() + 2;
        let header = std::str::from_utf8(&a[..text_end]).unwrap();
        assert!(header.contains("dtype: f64"));
        assert!(header.contains("count: 256"));
        assert_eq!(a.len() - text_end, 256 * 8);
        // payload starts with the value at the origin
        let first = f64::from_le_bytes(a[text_end..text_end + 8].try_into().unwrap());
        assert_eq!(first, 0.0);
        std::fs::remove_dir_all(&dir).ok();
    }
}
