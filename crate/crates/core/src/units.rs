//! Decibel conversions. The library itself works in linear units only.

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// nats to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_roundtrip() {
        for i in -400..=400 {
            let db = i as f64 * 0.1;
            assert!((linear_to_db(db_to_linear(db)) - db).abs() <= 1e-12);
        }
        assert_eq!(db_to_linear(-10.0), 0.1);
        assert!((nats_to_bits(std::f64::consts::LN_2) - 1.0).abs() < 1e-15);
    }
}
