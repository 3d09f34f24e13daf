//! Dereferenceability probes. Tests and the default configuration use a
//! fixture map; live HTTP is behind the `live-probe` feature.

use std::collections::BTreeMap;

use crate::vocab::ProbeEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub status: u16,
    /// `None` when no response arrived.
    pub latency_ms: Option<u64>,
}

impl ProbeOutcome {
    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}

pub trait DereferenceProbe: Send + Sync {
    fn probe(&self, iri: &str) -> ProbeOutcome;
}

/// Answers from a fixed map. IRIs missing from the map read as 404.
#[derive(Debug, Clone, Default)]
pub struct FixtureProbe {
    entries: BTreeMap<String, ProbeEntry>,
}

impl FixtureProbe {
    pub fn new(entries: BTreeMap<String, ProbeEntry>) -> Self {
        FixtureProbe { entries }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u16, u64)>) -> Self {
        FixtureProbe {
            entries: pairs
                .into_iter()
                .map(|(iri, status, latency_ms)| (iri.to_string(), ProbeEntry { status, latency_ms }))
                .collect(),
        }
    }
}

impl DereferenceProbe for FixtureProbe {
    fn probe(&self, iri: &str) -> ProbeOutcome {
        match self.entries.get(iri) {
            Some(e) => ProbeOutcome {
                status: e.status,
                latency_ms: Some(e.latency_ms),
            },
            None => ProbeOutcome {
                status: 404,
                latency_ms: None,
            },
        }
    }
}

/// Issues real GET requests.
#[cfg(feature = "live-probe")]
pub struct HttpProbe {
    client: reqwest::blocking::Client,
}

#[cfg(feature = "live-probe")]
impl HttpProbe {
    pub fn new(timeout: std::time::Duration) -> Result<Self, reqwest::Error> {
        Ok(HttpProbe {
            client: reqwest::blocking::Client::builder().timeout(timeout).build()?,
        })
    }
}

#[cfg(feature = "live-probe")]
impl DereferenceProbe for HttpProbe {
    fn probe(&self, iri: &str) -> ProbeOutcome {
        let start = std::time::Instant::now();
        match self.client.get(iri).send() {
            Ok(resp) => ProbeOutcome {
                status: resp.status().as_u16(),
                latency_ms: Some(start.elapsed().as_millis() as u64),
            },
            Err(e) => {
                log::debug!("probe {iri} failed: {e}");
                ProbeOutcome {
                    status: 0,
                    latency_ms: None,
                }
            }
        }
    }
}
