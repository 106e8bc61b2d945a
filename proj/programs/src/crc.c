/* Bitwise and table-driven CRC-32 over the same buffer must agree. */
unsigned char buf[256];
unsigned int table[256];

static unsigned int crc_bitwise(const unsigned char *p, int n) {
  unsigned int crc = 0xFFFFFFFFu;
  for (int i = 0; i < n; i++) {
    crc ^= p[i];
    for (int k = 0; k < 8; k++) crc = (crc >> 1) ^ (0xEDB88320u & -(crc & 1));
  }
  return ~crc;
}

static unsigned int crc_table(const unsigned char *p, int n) {
  unsigned int crc = 0xFFFFFFFFu;
  for (int i = 0; i < n; i++) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
  return ~crc;
}

int main(void) {
  for (int i = 0; i < 256; i++) {
    unsigned int c = i;
    for (int k = 0; k < 8; k++) c = c & 1 ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  unsigned int x = 12345;
  for (int i = 0; i < 256; i++) {
    x = x * 1103515245u + 12345u;
    buf[i] = (unsigned char)(x >> 16);
  }
  return crc_bitwise(buf, 256) != crc_table(buf, 256);
}
