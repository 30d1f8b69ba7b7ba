//! Radio transmit/receive costs and residual-energy bookkeeping against a
//! five-constituent ledger (individual, local, global, environment, sink).

use thiserror::Error;

use crate::network::Node;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("transmit distance must be non-negative, got {0}")]
    NegativeDistance(f64),
    #[error("consumption amount must be non-negative, got {0}")]
    NegativeAmount(f64),
    #[error("harvested energy must be non-negative, got {0}")]
    NegativeHarvest(f64),
    #[error("path-loss exponent must satisfy 1 < alpha <= 2, got {0}")]
    BadAlpha(f64),
    #[error("radio coefficients must be non-negative (e_amp={e_amp}, e_elec={e_elec})")]
    NegativeCoefficient { e_amp: f64, e_elec: f64 },
    #[error("packet size must be at least 1 bit, got {0}")]
    BadPacketBits(u32),
}

/// First-order radio model. Transmitting one packet over distance d costs
/// `e_amp * d^alpha * packet_bits`; receiving one costs
/// `e_elec * packet_bits`. The defaults (e_amp=1, e_elec=0, k=1, alpha=2)
/// make a transmission cost exactly d squared, which is the cost the
/// simulator's reference traces were produced with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub e_amp: f64,
    pub e_elec: f64,
    pub alpha: f64,
    pub packet_bits: u32,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            e_amp: 1.0,
            e_elec: 0.0,
            alpha: 2.0,
            packet_bits: 1,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(EnergyError::BadAlpha(self.alpha));
        }
        if self.e_amp < 0.0 || self.e_elec < 0.0 {
            return Err(EnergyError::NegativeCoefficient {
                e_amp: self.e_amp,
                e_elec: self.e_elec,
            });
        }
        if self.packet_bits < 1 {
            return Err(EnergyError::BadPacketBits(self.packet_bits));
        }
        Ok(())
    }

    /// `d^alpha` computed from the squared distance. At alpha == 2 this is
    /// just `d_sq`, kept exact instead of round-tripping through sqrt and
    /// powf; squared distances between grid points are exact in f64.
    pub fn dist_pow_alpha_from_sq(&self, d_sq: f64) -> f64 {
        if self.alpha == 2.0 {
            d_sq
        } else {
            d_sq.powf(self.alpha / 2.0)
        }
    }
}

/// Energy to transmit `packets` packets over distance `d`.
pub fn tx_energy(params: &RadioParams, d: f64, packets: u32) -> Result<f64, EnergyError> {
    if d < 0.0 {
        return Err(EnergyError::NegativeDistance(d));
    }
    Ok(tx_energy_from_dist_sq(params, d * d, packets))
}

/// Same cost, taken from the squared distance directly so callers that
/// already hold d squared keep the arithmetic exact at alpha == 2.
pub fn tx_energy_from_dist_sq(params: &RadioParams, d_sq: f64, packets: u32) -> f64 {
    params.e_amp * params.dist_pow_alpha_from_sq(d_sq) * params.packet_bits as f64 * packets as f64
}

/// Energy to receive `packets` packets.
pub fn rx_energy(params: &RadioParams, packets: u32) -> f64 {
    params.e_elec * params.packet_bits as f64 * packets as f64
}

/// The five energy constituents a charge can be booked under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constituent {
    Individual,
    Local,
    Global,
    Environment,
    Sink,
}

/// Accumulated consumption per constituent over some window. Environment
/// is the one slot that may go negative: harvested energy is booked there
/// with a minus sign.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstituentLedger {
    pub individual: f64,
    pub local: f64,
    pub global: f64,
    pub environment: f64,
    pub sink: f64,
}

impl ConstituentLedger {
    pub fn slot_mut(&mut self, c: Constituent) -> &mut f64 {
        match c {
            Constituent::Individual => &mut self.individual,
            Constituent::Local => &mut self.local,
            Constituent::Global => &mut self.global,
            Constituent::Environment => &mut self.environment,
            Constituent::Sink => &mut self.sink,
        }
    }

    /// Unweighted total, i.e. `weighted_total` with every lambda at its
    /// default of 1.
    pub fn total(&self) -> f64 {
        self.weighted_total(&[1.0; 5])
    }

    /// Lambda-weighted sum over the five constituents, in the field order
    /// individual, local, global, environment, sink.
    pub fn weighted_total(&self, lambdas: &[f64; 5]) -> f64 {
        lambdas[0] * self.individual
            + lambdas[1] * self.local
            + lambdas[2] * self.global
            + lambdas[3] * self.environment
            + lambdas[4] * self.sink
    }

    pub fn add(&mut self, other: &ConstituentLedger) {
        self.individual += other.individual;
        self.local += other.local;
        self.global += other.global;
        self.environment += other.environment;
        self.sink += other.sink;
    }
}

/// Books `amount` against the node and the ledger slot. The residual is
/// floored at 0 but the ledger records the full requested amount; a node
/// driven to 0 is marked dead. Callers that need exact conservation must
/// only request amounts the node can afford.
pub fn apply_consumption(
    node: &mut Node,
    amount: f64,
    constituent: Constituent,
    ledger: &mut ConstituentLedger,
) -> Result<(), EnergyError> {
    if amount < 0.0 {
        return Err(EnergyError::NegativeAmount(amount));
    }
    node.residual_energy = (node.residual_energy - amount).max(0.0);
    *ledger.slot_mut(constituent) += amount;
    if node.residual_energy <= 0.0 {
        node.alive = false;
    }
    Ok(())
}

/// Credits harvested energy to the node and books it (negatively) under
/// the environment slot. A dead node brought back above 0 revives.
pub fn harvest(node: &mut Node, h: f64, ledger: &mut ConstituentLedger) -> Result<(), EnergyError> {
    if h < 0.0 {
        return Err(EnergyError::NegativeHarvest(h));
    }
    node.residual_energy += h;
    ledger.environment -= h;
    if !node.alive && node.residual_energy > 0.0 {
        node.alive = true;
    }
    Ok(())
}
