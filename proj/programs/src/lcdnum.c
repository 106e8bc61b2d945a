/* Seven-segment encoding of a digit stream, with a byte-wise reverse map. */
unsigned char seg[10] = {0x3F, 0x06, 0x5B, 0x4F, 0x66, 0x6D, 0x7D, 0x07, 0x7F, 0x6F};
unsigned char display[64];

static int decode(unsigned char s) {
  for (int d = 0; d < 10; d++)
    if (seg[d] == s) return d;
  return -1;
}

int main(void) {
  unsigned int v = 314159265u;
  for (int i = 0; i < 64; i++) {
    display[i] = seg[v % 10];
    v = v / 10 + (unsigned int)i * 977u;
  }
  v = 314159265u;
  for (int i = 0; i < 64; i++) {
    if (decode(display[i]) != (int)(v % 10)) return 1;
    v = v / 10 + (unsigned int)i * 977u;
  }
  return 0;
}
