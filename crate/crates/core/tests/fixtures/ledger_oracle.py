"""Independent energy-ledger oracle for the five-node fixture world.

Regenerate with:  python3 ledger_oracle.py > oracle_ledger.txt

World: base station at (50, 50); nodes (id, kind, x, y, energy)
  0 normal  (50, 60)  0.5 J    10 m from the base station
  1 normal  (80, 50)  0.5 J    30 m
  2 advance (50, 10)  1.0 J    40 m
  3 advance (20, 10)  1.0 J    50 m
  4 advance (50, 95)  1.0 J    45 m
m = 0.6 (3 of 5 advance), alpha = 1, p_opt = 0.2, so
  LEACH class p = 0.2 (epoch 5), SEP normal p = 0.125 (epoch 8),
  advance p = 0.25 (epoch 4).

Draw contract: one uniform draw per live election candidate, ascending id,
normal class before advance class; a candidate is elected iff it has not
served in the current epoch of its class and draw <= p / (1 - p * (r mod L)).
Members join the nearest head (lowest id on ties), pay tx to the head; heads
pay rx per member, aggregation of members + 1 signals, and tx to the base
station. No head: every participant sends directly. Z-SEP normals always send
directly and only advance nodes are candidates / cluster participants.

Each output line: protocol radio round spend0..spend4 packets_bs packets_ch heads
"""
import math

TRACE = [0.05, 0.62, 0.91, 0.18, 0.33, 0.74, 0.02, 0.47, 0.88, 0.29,
         0.56, 0.11, 0.97, 0.40, 0.23, 0.69, 0.08, 0.81, 0.35, 0.52,
         0.14, 0.93, 0.26, 0.61, 0.44, 0.07, 0.78, 0.19, 0.85, 0.31,
         0.66, 0.03, 0.58, 0.95, 0.12, 0.49, 0.72, 0.21, 0.38, 0.84,
         0.16, 0.99, 0.27, 0.54, 0.09, 0.63, 0.42, 0.87, 0.24, 0.70,
         0.36, 0.01, 0.59, 0.92, 0.13, 0.46, 0.80, 0.22, 0.67, 0.34]

NODES = [(0, "normal", 50.0, 60.0), (1, "normal", 80.0, 50.0),
         (2, "advance", 50.0, 10.0), (3, "advance", 20.0, 10.0),
         (4, "advance", 50.0, 95.0)]
BS = (50.0, 50.0)
K = 4000
RADIOS = {
    "reference": dict(e_elec=50e-9, e_fs=10e-12, e_amp=0.0013e-12, e_da=5e-9),
    "lowpower": dict(e_elec=5e-9, e_fs=10e-12, e_amp=0.013e-12, e_da=5e-9),
}
ROUNDS = 9


def dist(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def ledger(protocol, radio):
    e_elec, e_fs, e_amp, e_da = (radio[k] for k in ("e_elec", "e_fs", "e_amp", "e_da"))
    d0 = math.sqrt(e_fs / e_amp)

    def tx(d):
        amp = e_fs * K * d * d if d < d0 else e_amp * K * d ** 4
        return e_elec * K + amp

    pos = {i: (x, y) for i, _, x, y in NODES}
    kind = {i: k for i, k, _, _ in NODES}
    if protocol == "leach":
        classes = [(0.2, [0, 1, 2, 3, 4])]
    elif protocol == "sep":
        classes = [(0.125, [0, 1]), (0.25, [2, 3, 4])]
    else:
        classes = [(0.25, [2, 3, 4])]
    served = {i: False for i in pos}
    cursor = 0
    rows = []
    for r in range(ROUNDS):
        spend = [0.0] * 5
        bs = ch = 0
        if protocol == "zsep":
            for i in (0, 1):
                spend[i] += tx(dist(pos[i], BS))
                bs += 1
            participants = [2, 3, 4]
        else:
            participants = [0, 1, 2, 3, 4]
        heads = []
        for p, members in classes:
            L = round(1 / p)
            if r % L == 0:
                for i in members:
                    served[i] = False
            t = p / (1 - p * (r % L))
            for i in members:
                u = TRACE[cursor]
                cursor += 1
                if not served[i] and u <= t:
                    served[i] = True
                    heads.append(i)
        if not heads:
            for i in participants:
                spend[i] += tx(dist(pos[i], BS))
                bs += 1
        else:
            heads.sort()
            members_of = {h: [] for h in heads}
            for i in participants:
                if i in heads:
                    continue
                best = min(heads, key=lambda h: (dist(pos[i], pos[h]), h))
                members_of[best].append(i)
            for h in heads:
                for mbr in members_of[h]:
                    spend[mbr] += tx(dist(pos[mbr], pos[h]))
                    ch += 1
                n = len(members_of[h])
                spend[h] += e_elec * K * n + e_da * K * (n + 1)
                spend[h] += tx(dist(pos[h], BS))
                bs += 1
        rows.append((r, spend, bs, ch, len(heads)))
    return rows


if __name__ == "__main__":
    print("# generated by ledger_oracle.py; see its docstring for the world and contract")
    print("# trace " + ",".join(repr(u) for u in TRACE))
    for radio_name, radio in RADIOS.items():
        for protocol in ("leach", "sep", "zsep"):
            for r, spend, bs, ch, heads in ledger(protocol, radio):
                print(protocol, radio_name, r, *(repr(s) for s in spend), bs, ch, heads)
