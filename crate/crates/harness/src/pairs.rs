//! Original/opposite pair export for plotting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use oblknn_core::{oppose, Dataset, OblScheme};

use crate::error::Result;

pub const PAIRS_HEADER_PREFIX: &str = "row_id,kind,class";

/// Writes every row followed by its opposite under `scheme`.
/// Values use the shortest representation that reads back to the same number.
pub fn export_pairs(ds: &Dataset, scheme: OblScheme, out: &Path) -> Result<()> {
    let opposites = oppose(ds, scheme)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(out)?);
    write!(w, "{PAIRS_HEADER_PREFIX}")?;
    for k in 0..ds.n_features() {
        write!(w, ",f{k}")?;
    }
    writeln!(w)?;
    for i in 0..ds.n_samples() {
        let class = ds.labels.name_of(ds.labels.ids()[i]);
        for (kind, x) in [("original", &ds.features), ("opposite", &opposites.features)] {
            write!(w, "{i},{kind},{class}")?;
            for v in x.row(i) {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
