//! Matrix Market I/O: coordinate complex general for sparse matrices and
//! array complex for dense vectors.

use crate::error::{Error, Result};
use crate::linalg::sparse::{ComplexSparseMatrix, TripletBuilder};
use crate::scalar::{Cplx, Scalar};
use num_complex::Complex;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub fn write_matrix<T: Scalar, W: Write>(m: &ComplexSparseMatrix<T>, w: &mut W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for (r, c, v) in m.iter() {
        writeln!(w, "{} {} {:.17e} {:.17e}", r + 1, c + 1, v.re, v.im)?;
    }
    Ok(())
}

pub fn write_matrix_file<T: Scalar>(m: &ComplexSparseMatrix<T>, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_matrix(m, &mut f)
}

pub fn write_vector<T: Scalar, W: Write>(v: &[Cplx<T>], w: &mut W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array complex general")?;
    writeln!(w, "{} 1", v.len())?;
    for z in v {
        writeln!(w, "{:.17e} {:.17e}", z.re, z.im)?;
    }
    Ok(())
}

pub fn write_vector_file<T: Scalar>(v: &[Cplx<T>], path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_vector(v, &mut f)
}

pub fn read_matrix<T: Scalar, R: Read>(r: R) -> Result<ComplexSparseMatrix<T>> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid("empty matrix market stream"))??;
    let h = header.to_ascii_lowercase();
    if !h.starts_with("%%matrixmarket") || !h.contains("coordinate") || !h.contains("complex") {
        return Err(Error::invalid("expected coordinate complex matrix market header"));
    }
    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line?;
        if line.starts_with('%') || line.trim().is_empty() {
            continue;
        }
        size_line = Some(line);
        break;
    }
    let size_line = size_line.ok_or_else(|| Error::invalid("missing size line"))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::invalid("bad size line")))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::invalid("size line must be 'rows cols nnz'"));
    }
    let mut b = TripletBuilder::new(dims[0], dims[1]);
    let mut seen = 0usize;
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(Error::invalid(format!("bad entry line: '{t}'")));
        }
        let r: usize = parts[0].parse().map_err(|_| Error::invalid("bad row index"))?;
        let c: usize = parts[1].parse().map_err(|_| Error::invalid("bad col index"))?;
        let re: f64 = parts[2].parse().map_err(|_| Error::invalid("bad real value"))?;
        let im: f64 = parts[3].parse().map_err(|_| Error::invalid("bad imag value"))?;
        if r == 0 || c == 0 || r > dims[0] || c > dims[1] {
            return Err(Error::invalid("entry index out of range"));
        }
        b.push(r - 1, c - 1, Complex::new(crate::scalar::real(re), crate::scalar::real(im)));
        seen += 1;
    }
    if seen != dims[2] {
        return Err(Error::invalid(format!("expected {} entries, found {seen}", dims[2])));
    }
    Ok(b.finish())
}

pub fn read_matrix_file<T: Scalar>(path: &Path) -> Result<ComplexSparseMatrix<T>> {
    read_matrix(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn matrix_round_trip() {
        let mut b = TripletBuilder::<f64>::new(3, 4);
        b.push(0, 0, Complex64::new(1.5, -2.25));
        b.push(2, 3, Complex64::new(-0.125, 7.0));
        b.push(1, 1, Complex64::new(1e-17, 3.0));
        let m = b.finish();
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        let m2: ComplexSparseMatrix<f64> = read_matrix(&buf[..]).unwrap();
        assert_eq!(m, m2);
    }
}
