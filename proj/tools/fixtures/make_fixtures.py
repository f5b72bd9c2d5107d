"""Regenerate the checked-in test captures with scapy (independent of rawbyte)."""
import pathlib
import sys

from scapy.all import Ether, IP, UDP, TCP, Raw, wrpcap

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")
out.mkdir(parents=True, exist_ok=True)

payload = bytes(range(0x41, 0x41 + 18))
udp = (Ether(dst="02:00:00:00:00:02", src="02:00:00:00:00:01")
       / IP(src="10.0.0.1", dst="10.0.0.2", id=1, ttl=64)
       / UDP(sport=5000, dport=53)
       / Raw(payload))
udp.time = 1600000000.25
assert len(bytes(udp)) == 60
wrpcap(str(out / "one_udp.pcap"), [udp])

# One conversation in both directions plus a second flow: 2 sessions, 3 flows, 5 packets.
a, b, c = "192.168.1.10", "192.168.1.20", "192.168.1.30"
pkts = [
    Ether() / IP(src=a, dst=b) / TCP(sport=40000, dport=80, flags="S"),
    Ether() / IP(src=b, dst=a) / TCP(sport=80, dport=40000, flags="SA"),
    Ether() / IP(src=a, dst=b) / TCP(sport=40000, dport=80, flags="A") / Raw(b"GET / HTTP/1.0\r\n\r\n"),
    Ether() / IP(src=a, dst=c, ihl=6, options=b"\x01\x01\x01\x00") / UDP(sport=1234, dport=53) / Raw(b"q" * 12),
    Ether() / IP(src=b, dst=a) / TCP(sport=80, dport=40000, flags="PA", options=[("NOP", None), ("NOP", None), ("Timestamp", (1, 2))]) / Raw(b"HTTP/1.0 200 OK\r\n"),
]
for i, p in enumerate(pkts):
    p.time = 1600000100 + i * 0.001
wrpcap(str(out / "benign.pcap"), pkts)
