use crate::entropy::Entropy;
use crate::error::{Error, Result};
use crate::games::FiniteGame;

/// Selects a vector field: game, entropy, learning temperature and per-player rates.
#[derive(Clone, Debug)]
pub struct DynamicsSpec<'a> {
    pub game: &'a FiniteGame,
    pub entropy: Entropy,
    pub temperature: f64,
    pub rates: Vec<f64>,
}

impl<'a> DynamicsSpec<'a> {
    /// Unit rates for every player.
    pub fn new(game: &'a FiniteGame, entropy: Entropy, temperature: f64) -> Self {
        DynamicsSpec {
            game,
            entropy,
            temperature,
            rates: vec![1.0; game.num_players()],
        }
    }

    pub fn with_rates(mut self, rates: Vec<f64>) -> Result<Self> {
        self.rates = rates;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.temperature.is_finite() {
            return Err(Error::invalid("temperature must be finite"));
        }
        if self.rates.len() != self.game.num_players() {
            return Err(Error::invalid("one rate per player is required"));
        }
        if self.rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::invalid("rates must be positive"));
        }
        Ok(())
    }

    /// The same dynamics with payoffs and temperature negated.
    pub fn reversed(&self, negated_game: &'a FiniteGame) -> DynamicsSpec<'a> {
        DynamicsSpec {
            game: negated_game,
            entropy: self.entropy,
            temperature: -self.temperature,
            rates: self.rates.clone(),
        }
    }
}
