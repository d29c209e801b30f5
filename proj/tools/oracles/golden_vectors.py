"""Independent reference for the frozen digests in the unit tests.

Uses only hashlib so the values do not depend on the C++ implementation.
"""
import hashlib
import struct


def field(b):
    return struct.pack("<Q", len(b)) + b


def block_bytes(tx, root, trailing, nonce):
    return b"\x00" + field(tx) + field(root) + field(trailing) + field(nonce)


def nakamoto_bytes(tx, prev, nonce):
    return b"\x02" + field(tx) + field(prev) + field(nonce)


def h(data, bits=256):
    return hashlib.sha256(data).digest()[: bits // 8]


def merkle_root(leaves):
    n = 1
    while n < len(leaves):
        n *= 2
    width = len(leaves[0])
    level = list(leaves) + [bytes(width)] * (n - len(leaves))
    if len(level) == 1:
        return h(b"\x01" + level[0], width * 8)
    while len(level) > 1:
        level = [h(b"\x01" + level[i] + level[i + 1], width * 8) for i in range(0, len(level), 2)]
    return level[0]


def genesis(i, bits=256):
    z = bytes(bits // 8)
    return h(block_bytes(f"genesis-{i}".encode(), z, z, bytes(8)), bits)


if __name__ == "__main__":
    fixture = block_bytes(b"parchain fixture block", bytes([0x11]) * 32, bytes([0x22]) * 32, bytes(range(1, 9)))
    print("fixture_block_256", h(fixture).hex())
    fixture128 = block_bytes(b"parchain fixture block", bytes([0x11]) * 16, bytes([0x22]) * 16, bytes(range(1, 9)))
    print("fixture_block_128", h(fixture128, 128).hex())
    for i in range(4):
        print(f"genesis_{i}", genesis(i).hex())
    print("merkle_root_k4_genesis", merkle_root([genesis(i) for i in range(4)]).hex())
    print("merkle_root_k3_genesis", merkle_root([genesis(i) for i in range(3)]).hex())
    print("merkle_root_k1_genesis", merkle_root([genesis(0)]).hex())
    z = bytes(32)
    print("nakamoto_genesis", h(nakamoto_bytes(b"genesis-0", z, bytes(8))).hex())
