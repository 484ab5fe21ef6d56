//! Plain-text exports of lattice operators and spectra.

use std::io::{self, Write};

use super::sparse::CsrMatrix;

/// One `row col re im` line per stored entry, preceded by a size header.
pub fn write_coordinate(m: &CsrMatrix, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "% n={} nnz={}", m.n, m.nnz())?;
    for i in 0..m.n {
        for (j, v) in m.row(i) {
            writeln!(w, "{i} {j} {:.17e} {:.17e}", v.re, v.im)?;
        }
    }
    Ok(())
}

/// `index,eigenvalue` CSV.
pub fn write_eigenvalues_csv(values: &[f64], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "index,eigenvalue")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{i},{v:.17e}")?;
    }
    Ok(())
}
