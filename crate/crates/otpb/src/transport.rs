//! Framed duplex transport for a two-endpoint key session.
//!
//! One byte-oriented wire multiplexes two logical channels: the noisy
//! optical channel, carried as blocks of post-noise phase samples
//! ([`FrameType::PhaseBlock`]), and the public classical channel (hash
//! seeds, run announcements, aborts). Two interchangeable endpoint
//! implementations are provided — an in-process queue pair and a
//! generic byte-stream pair — behind one [`FrameChannel`] trait, so
//! session code never knows which is in use.
//!
//! The transport is assumed reliable and ordered (point-to-point link;
//! no retransmission logic). An optional eavesdrop tap tees every
//! phase-block frame, byte for byte, to a passive observer at the
//! sender boundary, and a capture sink can record all frames of a
//! session to a length-prefixed file for offline analysis.

use std::io::{Read, Write};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};

use crate::error::{Error, FrameError, Result};

/// Byte values used on the wire for each frame type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum FrameType {
    /// A block of 64-bit big-endian phase samples (the noisy channel).
    PhaseBlock = 1,
    /// Seed bits identifying a hashing instance (classical channel).
    HashSeed = 2,
    /// Round bookkeeping: parameters and acknowledgements.
    RunAnnounce = 3,
    /// Unrecoverable failure; the session stops after this frame.
    Abort = 4,
}

impl FrameType {
    fn from_byte(b: u8) -> std::result::Result<Self, FrameError> {
        match b {
            1 => Ok(FrameType::PhaseBlock),
            2 => Ok(FrameType::HashSeed),
            3 => Ok(FrameType::RunAnnounce),
            4 => Ok(FrameType::Abort),
            other => Err(FrameError::UnknownType(other)),
        }
    }
}

/// Length of the authentication tag field, in bytes.
pub const TAG_LEN: usize = 16;

/// Fixed per-frame overhead: length header, type byte, run index, tag.
pub const FRAME_OVERHEAD: usize = 4 + 1 + 4 + TAG_LEN;

/// One message on the wire.
///
/// Serialized form, bit-exact: 4-byte big-endian payload length, one
/// type byte, 4-byte big-endian run index, the payload, then a 16-byte
/// authentication tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireFrame {
    pub frame_type: FrameType,
    pub run_index: u32,
    pub payload: Vec<u8>,
    pub tag: [u8; TAG_LEN],
}

impl WireFrame {
    /// Frame with an all-zero tag; callers stamp it via a
    /// [`FrameAuthenticator`] before sending.
    pub fn untagged(frame_type: FrameType, run_index: u32, payload: Vec<u8>) -> Self {
        WireFrame {
            frame_type,
            run_index,
            payload,
            tag: [0; TAG_LEN],
        }
    }
}

/// Serializes a frame into its exact wire bytes.
pub fn encode_frame(frame: &WireFrame) -> Vec<u8> {
    let len = u32::try_from(frame.payload.len()).expect("payload length must fit in 32 bits");
    let mut out = Vec::with_capacity(FRAME_OVERHEAD + frame.payload.len());
    out.extend_from_slice(&len.to_be_bytes());
    out.push(frame.frame_type as u8);
    out.extend_from_slice(&frame.run_index.to_be_bytes());
    out.extend_from_slice(&frame.payload);
    out.extend_from_slice(&frame.tag);
    out
}

/// Parses one complete frame occupying the whole buffer.
///
/// Rejects truncated input, unknown type bytes, and trailing bytes, each
/// with an error naming the offending field.
pub fn decode_frame(bytes: &[u8]) -> std::result::Result<WireFrame, FrameError> {
    let take = |at: usize, n: usize, field: &'static str| -> std::result::Result<&[u8], FrameError> {
        if bytes.len() < at + n {
            Err(FrameError::Truncated {
                field,
                needed: n,
                available: bytes.len().saturating_sub(at),
            })
        } else {
            Ok(&bytes[at..at + n])
        }
    };
    let len_bytes = take(0, 4, "payload length")?;
    let payload_len = u32::from_be_bytes(len_bytes.try_into().unwrap()) as usize;
    let type_byte = take(4, 1, "frame type")?[0];
    let frame_type = FrameType::from_byte(type_byte)?;
    let run_bytes = take(5, 4, "run index")?;
    let run_index = u32::from_be_bytes(run_bytes.try_into().unwrap());
    let payload = take(9, payload_len, "payload")?.to_vec();
    let tag_bytes = take(9 + payload_len, TAG_LEN, "tag")?;
    let total = FRAME_OVERHEAD + payload_len;
    if bytes.len() != total {
        return Err(FrameError::LengthMismatch {
            declared: payload_len,
            actual: bytes.len() - FRAME_OVERHEAD,
        });
    }
    Ok(WireFrame {
        frame_type,
        run_index,
        payload,
        tag: tag_bytes.try_into().unwrap(),
    })
}

/// Packs phase samples as consecutive 64-bit big-endian values.
pub fn phases_to_payload(phases: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(phases.len() * 8);
    for p in phases {
        out.extend_from_slice(&p.to_bits().to_be_bytes());
    }
    out
}

/// Recovers phase samples from a phase-block payload, bit exactly.
pub fn payload_to_phases(payload: &[u8]) -> std::result::Result<Vec<f64>, FrameError> {
    if payload.len() % 8 != 0 {
        return Err(FrameError::PhasePayload { len: payload.len() });
    }
    Ok(payload
        .chunks_exact(8)
        .map(|c| f64::from_bits(u64::from_be_bytes(c.try_into().unwrap())))
        .collect())
}

/// Keyed tag scheme stamped on every classical-channel frame.
///
/// The interface is pluggable; the shipped [`PlaceholderTag`] is a
/// stated non-cryptographic stand-in, not a MAC.
pub trait FrameAuthenticator: Send {
    /// Tag over the authenticated fields (type, run index, payload).
    fn tag(&self, frame_type: FrameType, run_index: u32, payload: &[u8]) -> [u8; TAG_LEN];

    /// Stamps a frame in place.
    fn stamp(&self, frame: &mut WireFrame) {
        frame.tag = self.tag(frame.frame_type, frame.run_index, &frame.payload);
    }

    /// Checks a received frame's tag against a recomputation.
    fn verify(&self, frame: &WireFrame) -> bool {
        frame.tag == self.tag(frame.frame_type, frame.run_index, &frame.payload)
    }
}

/// Default tag scheme: two keyed 64-bit mixing lanes over the frame
/// fields with an avalanche finisher.
///
/// NOT a message-authentication code — it detects accidental and
/// test-injected tampering deterministically, but offers no resistance
/// to an adversary who knows the algorithm. Production use would drop a
/// real MAC behind [`FrameAuthenticator`].
#[derive(Debug, Clone)]
pub struct PlaceholderTag {
    lane_keys: [u64; 2],
}

/// 64-bit avalanche finisher (splitmix64 style).
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl PlaceholderTag {
    /// Derives two independent lane keys from one session key.
    pub fn new(session_key: u64) -> Self {
        PlaceholderTag {
            lane_keys: [mix64(session_key), mix64(session_key.wrapping_add(1))],
        }
    }
}

impl FrameAuthenticator for PlaceholderTag {
    fn tag(&self, frame_type: FrameType, run_index: u32, payload: &[u8]) -> [u8; TAG_LEN] {
        let mut lanes = self.lane_keys;
        for (i, lane) in lanes.iter_mut().enumerate() {
            let mut acc = *lane ^ ((frame_type as u64) << 32) ^ u64::from(run_index);
            // FNV-style absorb with a lane-specific multiplier.
            let mult = [0x0000_0100_0000_01b3, 0x0000_01b8_73593_5c5u64][i];
            for &b in payload {
                acc = (acc ^ u64::from(b)).wrapping_mul(mult);
            }
            *lane = mix64(acc ^ (payload.len() as u64));
        }
        let mut tag = [0u8; TAG_LEN];
        tag[..8].copy_from_slice(&lanes[0].to_be_bytes());
        tag[8..].copy_from_slice(&lanes[1].to_be_bytes());
        tag
    }
}

/// Append-only record sink: each frame is stored as a 4-byte big-endian
/// record length followed by the exact wire bytes.
pub struct CaptureWriter<W: Write> {
    sink: W,
    frames: u64,
}

impl<W: Write> CaptureWriter<W> {
    pub fn new(sink: W) -> Self {
        CaptureWriter { sink, frames: 0 }
    }

    /// Appends one frame's wire bytes as a record.
    pub fn record(&mut self, wire_bytes: &[u8]) -> std::io::Result<()> {
        let len = u32::try_from(wire_bytes.len()).expect("frame fits in a record");
        self.sink.write_all(&len.to_be_bytes())?;
        self.sink.write_all(wire_bytes)?;
        self.frames += 1;
        Ok(())
    }

    pub fn frames_recorded(&self) -> u64 {
        self.frames
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.sink.flush()
    }

    pub fn into_inner(self) -> W {
        self.sink
    }
}

/// Capture sink shareable by both endpoints of a pair, so one file
/// receives the session's full two-way frame sequence.
pub type SharedCapture = Arc<Mutex<CaptureWriter<Box<dyn Write + Send>>>>;

/// Wraps any writer as a capture sink both endpoints can append to.
pub fn shared_capture<W: Write + Send + 'static>(sink: W) -> SharedCapture {
    Arc::new(Mutex::new(CaptureWriter::new(Box::new(sink))))
}

/// Streaming reader for the capture-record format.
pub struct CaptureReader<R: Read> {
    src: R,
}

impl<R: Read> CaptureReader<R> {
    pub fn new(src: R) -> Self {
        CaptureReader { src }
    }

    /// Reads the next recorded frame; `Ok(None)` at a clean end of file.
    pub fn next_frame(&mut self) -> Result<Option<WireFrame>> {
        let mut len_buf = [0u8; 4];
        match self.src.read(&mut len_buf[..1])? {
            0 => return Ok(None),
            _ => self.src.read_exact(&mut len_buf[1..])?,
        }
        let len = u32::from_be_bytes(len_buf) as usize;
        let mut body = vec![0u8; len];
        self.src.read_exact(&mut body)?;
        Ok(Some(decode_frame(&body).map_err(Error::from)?))
    }
}

/// Reads a whole capture into memory, in record order.
pub fn read_capture<R: Read>(src: R) -> Result<Vec<WireFrame>> {
    let mut reader = CaptureReader::new(src);
    let mut frames = Vec::new();
    while let Some(f) = reader.next_frame()? {
        frames.push(f);
    }
    Ok(frames)
}

/// Passive observer's view: every phase-block frame that crossed the
/// wire, in send order, byte-identical to what the receiver got (unless
/// the sender supplied an independent tap draw).
pub struct EveTap {
    rx: mpsc::Receiver<Vec<u8>>,
}

impl EveTap {
    /// Next tapped frame, if one is waiting.
    pub fn try_next(&self) -> Result<Option<WireFrame>> {
        match self.rx.try_recv() {
            Ok(bytes) => Ok(Some(decode_frame(&bytes).map_err(Error::from)?)),
            Err(mpsc::TryRecvError::Empty) | Err(mpsc::TryRecvError::Disconnected) => Ok(None),
        }
    }

    /// Drains all tapped frames currently buffered.
    pub fn drain(&self) -> Result<Vec<WireFrame>> {
        let mut out = Vec::new();
        while let Some(f) = self.try_next()? {
            out.push(f);
        }
        Ok(out)
    }

    /// Drains tapped phase blocks as (run index, samples) pairs.
    pub fn drain_phase_blocks(&self) -> Result<Vec<(u32, Vec<f64>)>> {
        let mut out = Vec::new();
        for f in self.drain()? {
            if f.frame_type == FrameType::PhaseBlock {
                out.push((f.run_index, payload_to_phases(&f.payload).map_err(Error::from)?));
            }
        }
        Ok(out)
    }
}

/// One end of a reliable, ordered duplex frame channel.
///
/// Endpoints are single-owner and transferable between threads. Frames
/// arrive exactly once, in send order, per direction.
pub trait FrameChannel: Send {
    /// Sends one frame to the peer.
    fn send_frame(&mut self, frame: &WireFrame) -> Result<()>;

    /// Sends a phase-block frame while handing the tap a frame with
    /// `tap_payload` instead of the delivered payload — the
    /// independent-measurement-draw eavesdropper model. With no tap
    /// attached this is an ordinary send.
    fn send_frame_with_tap_payload(&mut self, frame: &WireFrame, tap_payload: &[u8])
        -> Result<()>;

    /// Receives the next frame, blocking until it arrives.
    fn recv_frame(&mut self) -> Result<WireFrame>;

    /// Attaches a shared capture sink recording every frame this
    /// endpoint sends.
    fn set_capture(&mut self, capture: SharedCapture);
}

/// Tee state shared by both endpoint kinds.
struct SendSide {
    tap: Option<mpsc::Sender<Vec<u8>>>,
    capture: Option<SharedCapture>,
}

impl SendSide {
    /// Copies wire bytes to the tap (phase blocks only) and the capture
    /// sink (all frames). A departed tap consumer silently detaches; a
    /// failing capture sink is an error, since captures are artifacts
    /// the caller asked for.
    fn tee(&mut self, frame_type: FrameType, wire_bytes: &[u8], tap_bytes: &[u8]) -> Result<()> {
        if frame_type == FrameType::PhaseBlock {
            if let Some(tap) = &self.tap {
                if tap.send(tap_bytes.to_vec()).is_err() {
                    self.tap = None;
                }
            }
        }
        if let Some(capture) = &self.capture {
            let mut guard = capture.lock().map_err(|_| {
                Error::Transport("capture sink poisoned by a panicked holder".into())
            })?;
            guard.record(wire_bytes)?;
        }
        Ok(())
    }
}

/// In-process endpoint: frames cross between threads over queues, but
/// still pass through the byte-exact wire encoding so both transports
/// exercise identical parsing.
pub struct InprocEndpoint {
    tx: mpsc::Sender<Vec<u8>>,
    rx: mpsc::Receiver<Vec<u8>>,
    side: SendSide,
}

impl InprocEndpoint {
    fn send_bytes(&mut self, frame: &WireFrame, tap_override: Option<&[u8]>) -> Result<()> {
        let bytes = encode_frame(frame);
        let tap_bytes = match tap_override {
            Some(alt_payload) => {
                let mut alt = frame.clone();
                alt.payload = alt_payload.to_vec();
                encode_frame(&alt)
            }
            None => bytes.clone(),
        };
        self.side.tee(frame.frame_type, &bytes, &tap_bytes)?;
        self.tx
            .send(bytes)
            .map_err(|_| Error::Transport("peer endpoint dropped".into()))
    }
}

impl FrameChannel for InprocEndpoint {
    fn send_frame(&mut self, frame: &WireFrame) -> Result<()> {
        self.send_bytes(frame, None)
    }

    fn send_frame_with_tap_payload(
        &mut self,
        frame: &WireFrame,
        tap_payload: &[u8],
    ) -> Result<()> {
        self.send_bytes(frame, Some(tap_payload))
    }

    fn recv_frame(&mut self) -> Result<WireFrame> {
        let bytes = self
            .rx
            .recv()
            .map_err(|_| Error::Transport("peer endpoint dropped".into()))?;
        decode_frame(&bytes).map_err(Error::from)
    }

    fn set_capture(&mut self, capture: SharedCapture) {
        self.side.capture = Some(capture);
    }
}

/// Byte-stream endpoint over any reliable, ordered, connected duplex
/// stream (a socket, a socketpair half, a pipe pair adapter).
pub struct StreamEndpoint<S: Read + Write + Send> {
    stream: S,
    side: SendSide,
}

impl<S: Read + Write + Send> StreamEndpoint<S> {
    /// Wraps one half of a connected duplex byte stream.
    pub fn new(stream: S) -> Self {
        StreamEndpoint {
            stream,
            side: SendSide {
                tap: None,
                capture: None,
            },
        }
    }

    /// Attaches a tap sender teeing phase-block frames.
    pub fn set_tap(&mut self, tap: mpsc::Sender<Vec<u8>>) {
        self.side.tap = Some(tap);
    }

    fn send_bytes(&mut self, frame: &WireFrame, tap_override: Option<&[u8]>) -> Result<()> {
        let bytes = encode_frame(frame);
        let tap_bytes = match tap_override {
            Some(alt_payload) => {
                let mut alt = frame.clone();
                alt.payload = alt_payload.to_vec();
                encode_frame(&alt)
            }
            None => bytes.clone(),
        };
        self.side.tee(frame.frame_type, &bytes, &tap_bytes)?;
        self.stream.write_all(&bytes)?;
        self.stream.flush()?;
        Ok(())
    }
}

impl<S: Read + Write + Send> FrameChannel for StreamEndpoint<S> {
    fn send_frame(&mut self, frame: &WireFrame) -> Result<()> {
        self.send_bytes(frame, None)
    }

    fn send_frame_with_tap_payload(
        &mut self,
        frame: &WireFrame,
        tap_payload: &[u8],
    ) -> Result<()> {
        self.send_bytes(frame, Some(tap_payload))
    }

    fn recv_frame(&mut self) -> Result<WireFrame> {
        let mut header = [0u8; 9];
        self.stream.read_exact(&mut header)?;
        let payload_len = u32::from_be_bytes(header[..4].try_into().unwrap()) as usize;
        let mut rest = vec![0u8; payload_len + TAG_LEN];
        self.stream.read_exact(&mut rest)?;
        let mut whole = Vec::with_capacity(9 + rest.len());
        whole.extend_from_slice(&header);
        whole.extend_from_slice(&rest);
        decode_frame(&whole).map_err(Error::from)
    }

    fn set_capture(&mut self, capture: SharedCapture) {
        self.side.capture = Some(capture);
    }
}

/// A connected pair of endpoints plus the optional eavesdrop tap
/// observing phase blocks from both directions.
pub struct ChannelPair<A: FrameChannel, B: FrameChannel> {
    pub endpoint_a: A,
    pub endpoint_b: B,
    pub eavesdrop_tap: Option<EveTap>,
}

impl<A: FrameChannel, B: FrameChannel> ChannelPair<A, B> {
    /// Points both endpoints' capture hooks at one shared sink.
    pub fn attach_capture(&mut self, capture: &SharedCapture) {
        self.endpoint_a.set_capture(Arc::clone(capture));
        self.endpoint_b.set_capture(Arc::clone(capture));
    }
}

/// Builds an in-process endpoint pair, optionally tapped.
pub fn make_inproc_pair(with_tap: bool) -> ChannelPair<InprocEndpoint, InprocEndpoint> {
    let (tx_ab, rx_ab) = mpsc::channel();
    let (tx_ba, rx_ba) = mpsc::channel();
    let (tap_tx, tap_rx) = if with_tap {
        let (t, r) = mpsc::channel();
        (Some(t), Some(EveTap { rx: r }))
    } else {
        (None, None)
    };
    let endpoint_a = InprocEndpoint {
        tx: tx_ab,
        rx: rx_ba,
        side: SendSide {
            tap: tap_tx.clone(),
            capture: None,
        },
    };
    let endpoint_b = InprocEndpoint {
        tx: tx_ba,
        rx: rx_ab,
        side: SendSide {
            tap: tap_tx,
            capture: None,
        },
    };
    ChannelPair {
        endpoint_a,
        endpoint_b,
        eavesdrop_tap: tap_rx,
    }
}

/// Wraps two already-connected duplex byte streams (each the local half
/// of one link) as an endpoint pair, optionally tapped.
pub fn make_stream_pair<SA, SB>(
    stream_a: SA,
    stream_b: SB,
    with_tap: bool,
) -> ChannelPair<StreamEndpoint<SA>, StreamEndpoint<SB>>
where
    SA: Read + Write + Send,
    SB: Read + Write + Send,
{
    let mut endpoint_a = StreamEndpoint::new(stream_a);
    let mut endpoint_b = StreamEndpoint::new(stream_b);
    let eavesdrop_tap = if with_tap {
        let (t, r) = mpsc::channel();
        endpoint_a.set_tap(t.clone());
        endpoint_b.set_tap(t);
        Some(EveTap { rx: r })
    } else {
        None
    };
    ChannelPair {
        endpoint_a,
        endpoint_b,
        eavesdrop_tap,
    }
}
