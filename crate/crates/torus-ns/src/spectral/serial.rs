//! Field serialization: a one-line JSON header followed by the coefficients
//! as little-endian f64 `(re, im)` pairs, modes in lexicographic order and
//! components innermost.

use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FieldFlags, FourierField, Lattice, SpectralError};

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    n: usize,
    #[serde(rename = "K")]
    cutoff: usize,
    components: usize,
    dotted: bool,
    solenoidal: bool,
    potential: bool,
}

pub fn write_field<W: Write>(mut w: W, field: &FourierField) -> Result<(), SpectralError> {
    let header = Header {
        n: field.lattice().dimension(),
        cutoff: field.lattice().cutoff(),
        components: field.components(),
        dotted: field.flags().dotted,
        solenoidal: field.flags().solenoidal,
        potential: field.flags().potential,
    };
    let line = serde_json::to_string(&header).map_err(|e| SpectralError::Header(e.to_string()))?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    let modes = field.lattice().mode_count();
    for idx in 0..modes {
        for comp in 0..field.components() {
            let c = field.coeff(comp, idx);
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_field<R: Read>(r: R) -> Result<FourierField, SpectralError> {
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let header: Header =
        serde_json::from_str(line.trim()).map_err(|e| SpectralError::Header(e.to_string()))?;
    let lattice = Lattice::new(header.n, header.cutoff)?;
    let mut field = FourierField::zeros(lattice, header.components);
    let modes = field.lattice().mode_count();
    let mut buf = [0u8; 16];
    for idx in 0..modes {
        for comp in 0..header.components {
            reader.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
            *field.coeff_mut(comp, idx) = Complex64::new(re, im);
        }
    }
    *field.flags_mut() = FieldFlags {
        dotted: header.dotted,
        solenoidal: header.solenoidal,
        potential: header.potential,
    };
    Ok(field)
}
