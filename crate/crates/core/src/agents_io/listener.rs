//! Line-protocol listener standing in for automatic agents.
//!
//! Each client sends event lines; each line is answered `OK` or
//! `ERR <reason>`. Connections are served on their own threads, but every
//! accepted event goes through one channel to a single dispatcher thread,
//! so the sink sees one serialized, arrival-ordered stream.

use std::io::{BufRead, BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Sender};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};

use super::events::parse_event_line;
use super::AgentsIoError;
use crate::runtime::Event;

#[derive(Default)]
struct Connections {
    streams: Vec<TcpStream>,
    workers: Vec<JoinHandle<()>>,
}

/// A running listener. Dropping it shuts it down.
pub struct ListenerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    connections: Arc<Mutex<Connections>>,
    acceptor: Option<JoinHandle<()>>,
    dispatcher: Option<JoinHandle<()>>,
}

/// Binds `addr` and starts serving. Every well-formed line becomes one call
/// of `sink`, in arrival order.
pub fn listen_auto<A, F>(addr: A, sink: F) -> Result<ListenerHandle, AgentsIoError>
where
    A: ToSocketAddrs + std::fmt::Debug,
    F: FnMut(Event) + Send + 'static,
{
    let describe = format!("{addr:?}");
    let listener = TcpListener::bind(&addr).map_err(|source| AgentsIoError::Bind {
        addr: describe.clone(),
        source,
    })?;
    let local = listener
        .local_addr()
        .map_err(|source| AgentsIoError::Bind {
            addr: describe,
            source,
        })?;

    let (tx, rx) = mpsc::channel::<Event>();
    let dispatcher = thread::spawn(move || {
        let mut sink = sink;
        for ev in rx {
            sink(ev);
        }
    });

    let stop = Arc::new(AtomicBool::new(false));
    let connections = Arc::new(Mutex::new(Connections::default()));
    let acceptor = {
        let stop = Arc::clone(&stop);
        let connections = Arc::clone(&connections);
        thread::spawn(move || accept_loop(listener, tx, stop, connections))
    };

    Ok(ListenerHandle {
        addr: local,
        stop,
        connections,
        acceptor: Some(acceptor),
        dispatcher: Some(dispatcher),
    })
}

fn accept_loop(
    listener: TcpListener,
    tx: Sender<Event>,
    stop: Arc<AtomicBool>,
    connections: Arc<Mutex<Connections>>,
) {
    for stream in listener.incoming() {
        if stop.load(Ordering::SeqCst) {
            break;
        }
        let Ok(stream) = stream else { continue };
        let Ok(watch) = stream.try_clone() else {
            continue;
        };
        let tx = tx.clone();
        let worker = thread::spawn(move || serve_connection(stream, tx));
        let mut conns = connections.lock().expect("connection registry poisoned");
        conns.streams.push(watch);
        conns.workers.push(worker);
    }
}

fn serve_connection(stream: TcpStream, tx: Sender<Event>) {
    // One short reply per line: don't let Nagle hold it back.
    let _ = stream.set_nodelay(true);
    let Ok(mut writer) = stream.try_clone() else {
        return;
    };
    let mut reader = BufReader::new(stream);
    let mut buf = Vec::new();
    loop {
        buf.clear();
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) | Err(_) => return,
            Ok(_) => {}
        }
        let line = String::from_utf8_lossy(&buf);
        let reply = match parse_event_line(&line) {
            Ok(ev) => {
                if tx.send(ev).is_err() {
                    return;
                }
                "OK\n".to_string()
            }
            Err(reason) => format!("ERR {reason}\n"),
        };
        if writer.write_all(reply.as_bytes()).is_err() {
            return;
        }
    }
}

impl ListenerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting, closes open connections and waits until every
    /// accepted event has reached the sink.
    pub fn shutdown(mut self) {
        self.stop_and_join();
    }

    fn stop_and_join(&mut self) {
        let Some(acceptor) = self.acceptor.take() else {
            return;
        };
        self.stop.store(true, Ordering::SeqCst);
        // Wake the blocking accept.
        let mut wake = self.addr;
        if wake.ip().is_unspecified() {
            wake.set_ip(match wake {
                SocketAddr::V4(_) => [127, 0, 0, 1].into(),
                SocketAddr::V6(_) => std::net::Ipv6Addr::LOCALHOST.into(),
            });
        }
        let _ = TcpStream::connect(wake);
        let _ = acceptor.join();

        let conns = std::mem::take(
            &mut *self
                .connections
                .lock()
                .expect("connection registry poisoned"),
        );
        for s in &conns.streams {
            let _ = s.shutdown(Shutdown::Both);
        }
        for w in conns.workers {
            let _ = w.join();
        }
        // All senders are gone now, so the dispatcher drains and exits.
        if let Some(d) = self.dispatcher.take() {
            let _ = d.join();
        }
    }
}

impl Drop for ListenerHandle {
    fn drop(&mut self) {
        self.stop_and_join();
    }
}
