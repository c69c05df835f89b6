"""MS-OVBA compression (literal tokens only) and a `vbaProject.bin` builder.

The literal-only encoding is valid MS-OVBA: every chunk is marked compressed
and holds only literal tokens. A chunk payload is capped so that flag bytes
plus literals never exceed the 4096-byte compressed-chunk data limit.
"""

from __future__ import annotations

import struct

from .cfbwrite import CfbWriter

# 3640 literals + 455 flag bytes = 4095 <= 4096 data bytes per chunk
_LITERALS_PER_CHUNK = 3640


def ovba_compress(src: bytes) -> bytes:
    out = bytearray([0x01])
    pos = 0
    while pos < len(src):
        chunk = src[pos:pos + _LITERALS_PER_CHUNK]
        pos += len(chunk)
        body = bytearray()
        for i in range(0, len(chunk), 8):
            body.append(0x00)  # eight literal tokens follow
            body += chunk[i:i + 8]
        header = (len(body) + 2 - 3) | (0b011 << 12) | (1 << 15)
        out += struct.pack("<H", header)
        out += body
    return bytes(out)


def build_vba_project(modules: list[tuple[str, str]], codepage: int = 1252) -> bytes:
    """Build a minimal vbaProject.bin containing the given (name, source)
    modules; sources are stored with CRLF line endings."""

    def record(rec_id: int, payload: bytes) -> bytes:
        return struct.pack("<HL", rec_id, len(payload)) + payload

    dir_stream = bytearray()
    dir_stream += record(0x0001, struct.pack("<L", 1))          # PROJECTSYSKIND: win32
    dir_stream += record(0x0002, struct.pack("<L", 0x0409))     # PROJECTLCID
    dir_stream += record(0x0003, struct.pack("<H", codepage))   # PROJECTCODEPAGE
    dir_stream += record(0x0004, b"VBAProject")                 # PROJECTNAME
    dir_stream += record(0x000F, struct.pack("<H", len(modules)))  # PROJECTMODULES
    for name, _source in modules:
        raw_name = name.encode("ascii", errors="replace")
        dir_stream += record(0x0019, raw_name)                  # MODULENAME
        dir_stream += record(0x001A, raw_name)                  # MODULESTREAMNAME
        dir_stream += record(0x0031, struct.pack("<L", 0))      # MODULEOFFSET
        dir_stream += record(0x002B, b"")                       # MODULE terminator
    dir_stream += record(0x0010, b"")                           # dir terminator

    writer = CfbWriter()
    writer.add_stream("PROJECT", _project_stream_text(modules).encode("ascii"))
    writer.add_stream("VBA/_VBA_PROJECT", b"\xcc\x61\xff\xff\x00\x00\x00")
    writer.add_stream("VBA/dir", ovba_compress(bytes(dir_stream)))
    for name, source in modules:
        body = source.replace("\r\n", "\n").replace("\n", "\r\n").encode("cp1252", errors="replace")
        writer.add_stream(f"VBA/{name}", ovba_compress(body))
    return writer.tobytes()


def _project_stream_text(modules: list[tuple[str, str]]) -> str:
    lines = ["ID=\"{00000000-0000-0000-0000-000000000000}\""]
    for name, _ in modules:
        lines.append(f"Module={name}")
    lines.append("Name=\"VBAProject\"")
    return "\r\n".join(lines) + "\r\n"
