//! First-order radio energy model.
//!
//! Transmitting `k` bits over `d` meters costs `e_elec * k` for the
//! electronics plus an amplifier term that is `e_fs * k * d^2` below the
//! crossover distance and `e_amp * k * d^4` at or beyond it. Receiving costs
//! the electronics term only. Control traffic is free.

use crate::error::ConfigError;
use crate::model::RadioParams;

/// Distance at which the free-space and multipath amplifier terms meet.
pub fn crossover_distance(radio: &RadioParams) -> Result<f64, ConfigError> {
    if radio.e_fs.is_nan() || radio.e_fs <= 0.0 {
        return Err(ConfigError::NonPositive {
            field: "e_fs",
            value: radio.e_fs,
        });
    }
    if radio.e_amp.is_nan() || radio.e_amp <= 0.0 {
        return Err(ConfigError::NonPositive {
            field: "e_amp",
            value: radio.e_amp,
        });
    }
    Ok((radio.e_fs / radio.e_amp).sqrt())
}

fn d0(radio: &RadioParams) -> f64 {
    (radio.e_fs / radio.e_amp).sqrt()
}

/// Energy to transmit `bits` over `d` meters.
pub fn tx_energy(bits: u64, d: f64, radio: &RadioParams) -> f64 {
    let k = bits as f64;
    let amp = if d < d0(radio) {
        radio.e_fs * k * d * d
    } else {
        radio.e_amp * k * d.powi(4)
    };
    radio.e_elec * k + amp
}

/// Energy to receive `bits`.
pub fn rx_energy(bits: u64, radio: &RadioParams) -> f64 {
    radio.e_elec * bits as f64
}

/// Energy to fuse `signals` signals of `bits` each into one packet.
pub fn aggregation_energy(bits: u64, signals: usize, radio: &RadioParams) -> f64 {
    radio.e_da * bits as f64 * signals as f64
}
