//! Plain-text store dump: one stored system per line,
//! `<dimension> <labels> <invariant factors>`, lists comma separated and `-`
//! for an empty factor list.

use std::io::{self, BufRead, Write};

use super::StoredSystem;
use crate::blocks::BlockSystem;

pub fn write_checkpoint<W: Write>(mut w: W, config: &str, stored: &[StoredSystem]) -> io::Result<()> {
    writeln!(w, "# {config} {}", stored.len())?;
    for s in stored {
        let labels: Vec<String> = s.key.labels().iter().map(|l| l.to_string()).collect();
        let factors = if s.invariant_factors.is_empty() {
            "-".to_string()
        } else {
            s.invariant_factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",")
        };
        writeln!(w, "{} {} {}", s.dimension, labels.join(","), factors)?;
    }
    Ok(())
}

pub fn read_checkpoint<R: BufRead>(r: R) -> io::Result<Vec<StoredSystem>> {
    let bad = |n: usize| io::Error::new(io::ErrorKind::InvalidData, format!("checkpoint line {n}"));
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(bad(n + 1));
        }
        let dimension = parts[0].parse().map_err(|_| bad(n + 1))?;
        let labels: Vec<u16> =
            parts[1].split(',').map(|x| x.parse()).collect::<Result<_, _>>().map_err(|_| bad(n + 1))?;
        let invariant_factors = if parts[2] == "-" {
            Vec::new()
        } else {
            parts[2].split(',').map(|x| x.parse()).collect::<Result<_, _>>().map_err(|_| bad(n + 1))?
        };
        let key = BlockSystem::from_labels(&labels);
        if key.labels() != labels.as_slice() {
            return Err(bad(n + 1));
        }
        out.push(StoredSystem { key, dimension, invariant_factors });
    }
    Ok(out)
}
