use crate::model::{Capacity, Channel, EventId, Instance, Kind, Op, RawEvent};

/// Accumulates events thread by thread; ids are assigned sequentially from 1.
#[derive(Default)]
pub(crate) struct Builder {
    channels: Vec<Channel>,
    events: Vec<RawEvent>,
    rf: Vec<(EventId, EventId)>,
}

impl Builder {
    pub fn channel(&mut self, name: impl Into<String>, cap: Capacity) {
        self.channels.push(Channel {
            name: name.into(),
            cap,
        });
    }

    pub fn event(&mut self, thread: &str, op: Op, channel: &str, value: Option<&str>) -> EventId {
        let id = self.events.len() as EventId + 1;
        self.events.push(RawEvent::new(id, thread, op, channel, value));
        id
    }

    pub fn snd(&mut self, thread: &str, channel: &str) -> EventId {
        self.event(thread, Op::Snd, channel, None)
    }

    pub fn rcv(&mut self, thread: &str, channel: &str) -> EventId {
        self.event(thread, Op::Rcv, channel, None)
    }

    pub fn rf(&mut self, s: EventId, r: EventId) {
        self.rf.push((s, r));
    }

    pub fn finish(self, with_rf: bool) -> Instance {
        let rf = with_rf.then_some(self.rf);
        Instance::build(Kind::Abstract, self.channels, self.events, rf)
            .expect("generated instance is well-typed")
    }
}
