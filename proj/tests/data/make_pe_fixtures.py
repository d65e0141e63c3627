#!/usr/bin/env python3
"""Builds the minimal PE fixtures used by the import parser tests.

Each image has one section mapped at RVA 0x1000 from file offset 0x200.
Run from this directory; the outputs are committed next to this script.
"""
import struct

SECTION_RVA = 0x1000
FILE_ALIGN = 0x200


def build(path, *, pe32_plus, imports, clr=False):
    """imports: list of (dll_name, [symbol name or int ordinal])."""
    thunk = 8 if pe32_plus else 4
    ord_flag = (1 << 63) if pe32_plus else (1 << 31)
    body = bytearray(0x400)

    desc_off = 0
    cursor = 20 * (len(imports) + 1)
    cursor = (cursor + 15) & ~15
    layout = []
    for dll, syms in imports:
        ilt = cursor
        cursor += thunk * (len(syms) + 1)
        iat = cursor
        cursor += thunk * (len(syms) + 1)
        layout.append((dll, syms, ilt, iat))
    names = []
    for dll, syms, ilt, iat in layout:
        entries = []
        for s in syms:
            if isinstance(s, int):
                entries.append(ord_flag | s)
            else:
                cursor = (cursor + 1) & ~1
                hn = cursor
                blob = struct.pack("<H", 0) + s.encode() + b"\0"
                body[hn:hn + len(blob)] = blob
                cursor += len(blob)
                entries.append(SECTION_RVA + hn)
        dll_off = cursor
        body[dll_off:dll_off + len(dll) + 1] = dll.encode() + b"\0"
        cursor += len(dll) + 1
        fmt = "<Q" if pe32_plus else "<I"
        for i, e in enumerate(entries):
            struct.pack_into(fmt, body, ilt + i * thunk, e)
            struct.pack_into(fmt, body, iat + i * thunk, e)
        names.append((ilt, iat, dll_off))

    for i, (ilt, iat, dll_off) in enumerate(names):
        struct.pack_into("<IIIII", body, desc_off + 20 * i,
                         SECTION_RVA + ilt, 0, 0, SECTION_RVA + dll_off,
                         SECTION_RVA + iat)
    assert cursor <= len(body)
    import_size = 20 * (len(imports) + 1)

    clr_rva = 0
    if clr:
        clr_off = (cursor + 15) & ~15
        struct.pack_into("<I", body, clr_off, 72)
        clr_rva = SECTION_RVA + clr_off

    dos = bytearray(0x40)
    dos[0:2] = b"MZ"
    struct.pack_into("<I", dos, 0x3C, 0x40)

    opt_size = 0xF0 if pe32_plus else 0xE0
    coff = struct.pack("<4sHHIIIHH", b"PE\0\0", 0x8664 if pe32_plus else 0x14C,
                       1, 0, 0, 0, opt_size, 0x0022 if pe32_plus else 0x0102)

    dirs = [(0, 0)] * 16
    dirs[1] = (SECTION_RVA, import_size)
    if clr:
        dirs[14] = (clr_rva, 72)
    dir_blob = b"".join(struct.pack("<II", r, s) for r, s in dirs)

    if pe32_plus:
        opt = struct.pack("<HBBIIIIIQIIHHHHHHIIIIHHQQQQII",
                          0x20B, 14, 0, 0x200, 0, 0, SECTION_RVA, SECTION_RVA,
                          0x140000000, 0x1000, FILE_ALIGN, 6, 0, 0, 0, 6, 0, 0,
                          0x2000, 0x200, 0, 3, 0x8160,
                          0x100000, 0x1000, 0x100000, 0x1000, 0, 16)
    else:
        opt = struct.pack("<HBBIIIIIIIIIHHHHHHIIIIHHIIIIII",
                          0x10B, 14, 0, 0x200, 0, 0, SECTION_RVA, SECTION_RVA,
                          0, 0x400000, 0x1000, FILE_ALIGN, 4, 0, 0, 0, 4, 0, 0,
                          0x2000, 0x200, 0, 3, 0,
                          0x100000, 0x1000, 0x100000, 0x1000, 0, 16)
    opt += dir_blob
    assert len(opt) == opt_size, (len(opt), opt_size)

    section = struct.pack("<8sIIIIIIHHI", b".idata\0\0", len(body), SECTION_RVA,
                          len(body), FILE_ALIGN, 0, 0, 0, 0, 0xC0000040)

    headers = bytes(dos) + coff + opt + section
    headers += b"\0" * (FILE_ALIGN - len(headers))
    with open(path, "wb") as f:
        f.write(headers + bytes(body))


build("pe32_exitprocess.exe", pe32_plus=False,
      imports=[("KERNEL32.dll", ["ExitProcess"])])
build("pe32plus_mixed.exe", pe32_plus=True,
      imports=[("KERNEL32.dll", ["GetProcAddress", "LoadLibraryA"]),
               ("USER32.dll", ["MessageBoxA", 17])])
build("managed_stub.exe", pe32_plus=False,
      imports=[("mscoree.dll", ["_CorExeMain"])], clr=True)
