//! Standard MIDI File reader.
//!
//! Only what chordification needs is extracted: matched note-on/note-off
//! pairs on one absolute tick timeline. Tempo, controllers (including the
//! sustain pedal), program changes and sysex data are skipped.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// One sounding note, `onset_tick <= t < release_tick`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoteEvent {
    pub onset_tick: u64,
    pub release_tick: u64,
    pub pitch: u8,
    pub track: u16,
}

/// The header's time division.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Division {
    TicksPerQuarter(u16),
    /// Frames per second and ticks per frame.
    Smpte {
        fps: u8,
        ticks_per_frame: u8,
    },
}

impl Division {
    /// Ticks in the unit subdivided by the chordify quantizer. For SMPTE
    /// timing the unit is one second.
    pub fn ticks_per_beat(self) -> u32 {
        match self {
            Division::TicksPerQuarter(t) => u32::from(t),
            Division::Smpte {
                fps,
                ticks_per_frame,
            } => u32::from(fps) * u32::from(ticks_per_frame),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmfWarning {
    /// A note-on never released; closed at the track's final tick.
    UnmatchedNoteOn {
        track: u16,
        pitch: u8,
        onset_tick: u64,
        closed_at: u64,
    },
    /// A note-off with no pending note-on.
    OrphanNoteOff {
        track: u16,
        pitch: u8,
        tick: u64,
    },
    /// Note released on the tick it was struck; dropped.
    ZeroLength {
        track: u16,
        pitch: u8,
        tick: u64,
    },
    TrackCountMismatch {
        declared: u16,
        found: u16,
    },
    TrailingBytes(usize),
}

impl fmt::Display for SmfWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmfWarning::UnmatchedNoteOn {
                track,
                pitch,
                onset_tick,
                closed_at,
            } => write!(
                f,
                "track {track}: note-on pitch {pitch} at tick {onset_tick} never released, closed at tick {closed_at}"
            ),
            SmfWarning::OrphanNoteOff { track, pitch, tick } => {
                write!(f, "track {track}: note-off pitch {pitch} at tick {tick} without note-on")
            }
            SmfWarning::ZeroLength { track, pitch, tick } => {
                write!(f, "track {track}: zero-length note pitch {pitch} at tick {tick} dropped")
            }
            SmfWarning::TrackCountMismatch { declared, found } => {
                write!(f, "header declares {declared} tracks, found {found}")
            }
            SmfWarning::TrailingBytes(n) => write!(f, "{n} trailing bytes ignored"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmfError {
    #[error("malformed header: {0}")]
    BadHeader(&'static str),
    #[error("unsupported SMF format {0}")]
    UnsupportedFormat(u16),
    #[error("chunk at byte {offset} declares {declared} bytes but only {available} remain")]
    TruncatedChunk {
        offset: usize,
        declared: usize,
        available: usize,
    },
    #[error("track {track}: unexpected end of data at byte {offset}")]
    UnexpectedEnd { track: u16, offset: usize },
    #[error("track {track}: {reason} at byte {offset} (tick {tick})")]
    BadEvent {
        track: u16,
        offset: usize,
        tick: u64,
        reason: &'static str,
    },
}

/// Parsed note content of one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smf {
    pub format: u16,
    pub division: Division,
    /// Sorted by onset, then pitch, then track.
    pub notes: Vec<NoteEvent>,
    pub warnings: Vec<SmfWarning>,
}

/// Parses SMF format 0 or 1.
pub fn parse_smf(bytes: &[u8]) -> Result<Smf, SmfError> {
    let mut reader = ChunkReader { bytes, pos: 0 };
    let (id, header) = reader
        .next_chunk()?
        .ok_or(SmfError::BadHeader("missing MThd chunk"))?;
    if id != *b"MThd" {
        return Err(SmfError::BadHeader("file does not start with MThd"));
    }
    if header.len() < 6 {
        return Err(SmfError::BadHeader("MThd shorter than 6 bytes"));
    }
    let format = u16::from_be_bytes([header[0], header[1]]);
    let declared_tracks = u16::from_be_bytes([header[2], header[3]]);
    let raw_division = u16::from_be_bytes([header[4], header[5]]);
    match format {
        0 | 1 => {}
        other => return Err(SmfError::UnsupportedFormat(other)),
    }
    let division = if raw_division & 0x8000 == 0 {
        if raw_division == 0 {
            return Err(SmfError::BadHeader("zero ticks per quarter"));
        }
        Division::TicksPerQuarter(raw_division)
    } else {
        let fps = (-((raw_division >> 8) as u8 as i8)) as u8;
        let ticks_per_frame = (raw_division & 0xff) as u8;
        if fps == 0 || ticks_per_frame == 0 {
            return Err(SmfError::BadHeader("invalid SMPTE division"));
        }
        Division::Smpte {
            fps,
            ticks_per_frame,
        }
    };

    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    let mut track_index: u16 = 0;
    while let Some((id, body)) = reader.next_chunk()? {
        if id == *b"MTrk" {
            parse_track(body, track_index, &mut notes, &mut warnings)?;
            track_index += 1;
        }
    }
    let rest = bytes.len() - reader.pos;
    if rest > 0 {
        warnings.push(SmfWarning::TrailingBytes(rest));
    }
    if track_index != declared_tracks {
        warnings.push(SmfWarning::TrackCountMismatch {
            declared: declared_tracks,
            found: track_index,
        });
    }
    notes.sort_by_key(|n| (n.onset_tick, n.pitch, n.track, n.release_tick));
    Ok(Smf {
        format,
        division,
        notes,
        warnings,
    })
}

/// Chunk type tag and body.
type Chunk<'a> = ([u8; 4], &'a [u8]);

struct ChunkReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ChunkReader<'a> {
    /// `None` when fewer than 8 bytes remain.
    fn next_chunk(&mut self) -> Result<Option<Chunk<'a>>, SmfError> {
        let rest = &self.bytes[self.pos..];
        if rest.len() < 8 {
            return Ok(None);
        }
        let id = [rest[0], rest[1], rest[2], rest[3]];
        let len = u32::from_be_bytes([rest[4], rest[5], rest[6], rest[7]]) as usize;
        if rest.len() - 8 < len {
            return Err(SmfError::TruncatedChunk {
                offset: self.pos,
                declared: len,
                available: rest.len() - 8,
            });
        }
        let body = &rest[8..8 + len];
        self.pos += 8 + len;
        Ok(Some((id, body)))
    }
}

struct TrackCursor<'a> {
    data: &'a [u8],
    pos: usize,
    track: u16,
}

impl TrackCursor<'_> {
    fn byte(&mut self) -> Result<u8, SmfError> {
        let b = *self.data.get(self.pos).ok_or(SmfError::UnexpectedEnd {
            track: self.track,
            offset: self.pos,
        })?;
        self.pos += 1;
        Ok(b)
    }

    fn vlq(&mut self) -> Result<u32, SmfError> {
        let mut value: u32 = 0;
        for _ in 0..4 {
            let b = self.byte()?;
            value = (value << 7) | u32::from(b & 0x7f);
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(SmfError::BadEvent {
            track: self.track,
            offset: self.pos,
            tick: 0,
            reason: "variable-length quantity longer than 4 bytes",
        })
    }

    fn skip(&mut self, n: usize) -> Result<(), SmfError> {
        if self.data.len() - self.pos < n {
            return Err(SmfError::UnexpectedEnd {
                track: self.track,
                offset: self.data.len(),
            });
        }
        self.pos += n;
        Ok(())
    }
}

fn parse_track(
    data: &[u8],
    track: u16,
    notes: &mut Vec<NoteEvent>,
    warnings: &mut Vec<SmfWarning>,
) -> Result<(), SmfError> {
    let mut cur = TrackCursor {
        data,
        pos: 0,
        track,
    };
    let mut tick: u64 = 0;
    let mut running: Option<u8> = None;
    // (channel, pitch) -> onsets awaiting release, oldest first
    let mut pending: HashMap<(u8, u8), VecDeque<u64>> = HashMap::new();

    while cur.pos < data.len() {
        tick += u64::from(cur.vlq()?);
        let event_offset = cur.pos;
        let lead = cur.byte()?;
        let (status, first_data) = if lead & 0x80 != 0 {
            (lead, None)
        } else {
            match running {
                Some(s) => (s, Some(lead)),
                None => {
                    return Err(SmfError::BadEvent {
                        track,
                        offset: event_offset,
                        tick,
                        reason: "data byte without running status",
                    })
                }
            }
        };

        match status {
            0xff => {
                running = None;
                let kind = cur.byte()?;
                let len = cur.vlq()? as usize;
                cur.skip(len)?;
                if kind == 0x2f {
                    break;
                }
            }
            0xf0 | 0xf7 => {
                running = None;
                let len = cur.vlq()? as usize;
                cur.skip(len)?;
            }
            0x80..=0xef => {
                running = Some(status);
                let bad_data = |offset| SmfError::BadEvent {
                    track,
                    offset,
                    tick,
                    reason: "status byte inside channel message data",
                };
                let d1 = match first_data {
                    Some(d) => d,
                    None => cur.byte()?,
                };
                if d1 & 0x80 != 0 {
                    return Err(bad_data(cur.pos - 1));
                }
                let kind = status & 0xf0;
                let d2 = if kind == 0xc0 || kind == 0xd0 {
                    0
                } else {
                    let d = cur.byte()?;
                    if d & 0x80 != 0 {
                        return Err(bad_data(cur.pos - 1));
                    }
                    d
                };
                let key = (status & 0x0f, d1);
                match kind {
                    0x90 if d2 > 0 => pending.entry(key).or_default().push_back(tick),
                    0x80 | 0x90 => match pending.get_mut(&key).and_then(VecDeque::pop_front) {
                        Some(onset) => push_note(notes, warnings, track, d1, onset, tick),
                        None => warnings.push(SmfWarning::OrphanNoteOff {
                            track,
                            pitch: d1,
                            tick,
                        }),
                    },
                    _ => {}
                }
            }
            _ => {
                return Err(SmfError::BadEvent {
                    track,
                    offset: event_offset,
                    tick,
                    reason: "system message not allowed in a track",
                })
            }
        }
    }

    let mut leftovers: Vec<(u8, u64)> = pending
        .into_iter()
        .flat_map(|((_, pitch), onsets)| onsets.into_iter().map(move |o| (pitch, o)))
        .collect();
    leftovers.sort_unstable();
    for (pitch, onset) in leftovers {
        warnings.push(SmfWarning::UnmatchedNoteOn {
            track,
            pitch,
            onset_tick: onset,
            closed_at: tick,
        });
        push_note(notes, warnings, track, pitch, onset, tick);
    }
    Ok(())
}

fn push_note(
    notes: &mut Vec<NoteEvent>,
    warnings: &mut Vec<SmfWarning>,
    track: u16,
    pitch: u8,
    onset: u64,
    release: u64,
) {
    if release > onset {
        notes.push(NoteEvent {
            onset_tick: onset,
            release_tick: release,
            pitch,
            track,
        });
    } else {
        warnings.push(SmfWarning::ZeroLength {
            track,
            pitch,
            tick: onset,
        });
    }
}
