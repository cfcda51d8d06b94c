//! Slicing note events into a sequence of vertical simultaneities.
//!
//! One codeword is emitted per distinct quantized onset. Each codeword holds
//! every pitch sounding at that instant: the notes struck there plus those
//! struck earlier and still held. Silent stretches emit nothing, and
//! repeated identical codewords stay as separate positions.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::codeword::{Codeword, CodewordSequence};
use crate::smf::NoteEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChordifyOptions {
    /// Onsets are snapped to `1/divisor` of a beat.
    pub quantization_divisor: u32,
    /// Drop codewords sounding for fewer than this many quanta; 0 keeps all.
    pub min_duration: u32,
}

impl Default for ChordifyOptions {
    fn default() -> Self {
        ChordifyOptions {
            quantization_divisor: 16,
            min_duration: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChordifyError {
    #[error("no note events")]
    NoEvents,
    #[error("every codeword was shorter than the minimum duration")]
    AllFiltered,
    #[error("quantization divisor and ticks per beat must be positive")]
    BadResolution,
}

/// Snaps a tick to the nearest quantum, rounding halves up.
pub fn quantize(tick: u64, ticks_per_beat: u32, divisor: u32) -> u64 {
    let tpb = u128::from(ticks_per_beat);
    ((u128::from(tick) * u128::from(divisor) + tpb / 2) / tpb) as u64
}

struct QuantizedNote {
    onset: u64,
    release: u64,
    pitch: u8,
}

pub fn chordify(
    events: &[NoteEvent],
    ticks_per_beat: u32,
    opts: &ChordifyOptions,
) -> Result<CodewordSequence, ChordifyError> {
    if events.is_empty() {
        return Err(ChordifyError::NoEvents);
    }
    if ticks_per_beat == 0 || opts.quantization_divisor == 0 {
        return Err(ChordifyError::BadResolution);
    }
    let q = |t| quantize(t, ticks_per_beat, opts.quantization_divisor);
    let mut notes: Vec<QuantizedNote> = events
        .iter()
        .map(|e| {
            let onset = q(e.onset_tick);
            // a struck note always sounds for at least one quantum
            let release = q(e.release_tick).max(onset + 1);
            QuantizedNote {
                onset,
                release,
                pitch: e.pitch,
            }
        })
        .collect();
    notes.sort_by_key(|n| (n.onset, n.pitch));

    let mut onsets: Vec<u64> = notes.iter().map(|n| n.onset).collect();
    onsets.dedup();

    let mut sounding = [0u32; 128];
    let mut active: BinaryHeap<(Reverse<u64>, u8)> = BinaryHeap::new();
    let mut next = 0;
    let mut out = Vec::with_capacity(onsets.len());

    for (i, &t) in onsets.iter().enumerate() {
        while let Some(&(Reverse(release), pitch)) = active.peek() {
            if release > t {
                break;
            }
            active.pop();
            sounding[usize::from(pitch)] -= 1;
        }
        while next < notes.len() && notes[next].onset == t {
            let n = &notes[next];
            active.push((Reverse(n.release), n.pitch));
            sounding[usize::from(n.pitch)] += 1;
            next += 1;
        }

        if opts.min_duration > 0 {
            let last_release = active.iter().map(|(Reverse(r), _)| *r).max().unwrap_or(t);
            let end = onsets
                .get(i + 1)
                .map_or(last_release, |&n| n.min(last_release));
            if end - t < u64::from(opts.min_duration) {
                continue;
            }
        }

        let pitches: Vec<u8> = (0u8..128)
            .filter(|&p| sounding[usize::from(p)] > 0)
            .collect();
        // the notes just pushed guarantee at least one pitch
        out.push(Codeword::from_sorted(pitches).expect("onset slice has a struck note"));
    }

    CodewordSequence::new(out).ok_or(ChordifyError::AllFiltered)
}
