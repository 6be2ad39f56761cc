//! File formats: numeric CSV tables, incidence data, run configs and the
//! figure-data emitters.

mod config;
pub mod figures;
mod incidence;
mod table;

pub use config::{RunConfig, SEED_ENV};
pub use incidence::{parse_incidence_csv, read_incidence};
pub use table::CsvTable;

/// Formats `x` with at least ten significant digits, dropping trailing zeros.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if !(1e-5..1e15).contains(&a) {
        return format!("{x:.9e}");
    }
    let decimals = (9 - a.log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::format_number;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(format_number(2.0 / 3.0), "0.6666666667");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-12345.678901234), "-12345.6789");
        assert_eq!(format_number(123.4567890123), "123.456789");
        assert_eq!(format_number(0.0655187155569), "0.06551871556");
        assert_eq!(format_number(1.5e-7), "1.500000000e-7");
    }
}
