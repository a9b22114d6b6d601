/** Minimal binary PPM (P6, 8-bit) image reading and writing.
 *
 * PPM is a trivial self-describing raster format, which keeps image I/O
 * dependency-free and byte-exact: header "P6", width, height, maxval 255,
 * one whitespace byte, then width*height RGB triplets.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { ParseError } from "./errors.js";

/** Decoded 8-bit RGB image; data is interleaved RGB, length = width*height*3. */
export interface RawImage {
  width: number;
  height: number;
  data: Uint8Array;
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d || byte === 0x0c || byte === 0x0b;
}

/** Encode an image as a P6 PPM buffer. */
export function encodePpm(image: RawImage): Buffer {
  const { width, height, data } = image;
  if (data.length !== width * height * 3) {
    throw new ParseError(
      `pixel buffer has ${data.length} bytes, expected ${width * height * 3}`,
    );
  }
  const header = Buffer.from(`P6\n${width} ${height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(data)]);
}

/** Decode a P6 PPM buffer; `source` names the file in error messages. */
export function decodePpm(buffer: Buffer, source = "<buffer>"): RawImage {
  let pos = 0;

  const fail = (message: string): never => {
    throw new ParseError(`${source}: ${message}`);
  };

  const skipSpaceAndComments = (): void => {
    for (;;) {
      while (pos < buffer.length && isSpace(buffer[pos])) pos++;
      if (pos < buffer.length && buffer[pos] === 0x23 /* '#' */) {
        while (pos < buffer.length && buffer[pos] !== 0x0a) pos++;
      } else {
        return;
      }
    }
  };

  const readToken = (): string => {
    skipSpaceAndComments();
    const start = pos;
    while (pos < buffer.length && !isSpace(buffer[pos])) pos++;
    if (pos === start) fail("truncated header");
    return buffer.toString("ascii", start, pos);
  };

  const magic = readToken();
  if (magic !== "P6") fail(`not a binary PPM (magic ${JSON.stringify(magic)})`);
  const readInt = (what: string): number => {
    const token = readToken();
    if (!/^\d+$/.test(token)) fail(`${what} is not a positive integer: ${token}`);
    return Number.parseInt(token, 10);
  };
  const width = readInt("width");
  const height = readInt("height");
  const maxval = readInt("maxval");
  if (width <= 0 || height <= 0) fail(`bad dimensions ${width}x${height}`);
  if (maxval !== 255) fail(`only maxval 255 is supported, got ${maxval}`);
  if (pos >= buffer.length || !isSpace(buffer[pos])) fail("missing header terminator");
  pos++; // exactly one whitespace byte separates header and pixels

  const expected = width * height * 3;
  if (buffer.length - pos < expected) {
    fail(`pixel data truncated: need ${expected} bytes, have ${buffer.length - pos}`);
  }
  const data = new Uint8Array(buffer.subarray(pos, pos + expected));
  return { width, height, data };
}

/** Read a P6 PPM file from disk. */
export function readPpm(path: string): RawImage {
  return decodePpm(readFileSync(path), path);
}

/** Write an image to disk as P6 PPM. */
export function writePpm(path: string, image: RawImage): void {
  writeFileSync(path, encodePpm(image));
}
