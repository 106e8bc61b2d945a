/* Euclid's gcd over a grid, lcm via gcd, straight-line bit tricks. */
static unsigned int gcd(unsigned int a, unsigned int b) {
  while (b) {
    unsigned int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

unsigned int acc[4];

int main(void) {
  for (unsigned int i = 1; i <= 24; i++)
    for (unsigned int j = 1; j <= 24; j++) {
      unsigned int g = gcd(i * 12, j * 18);
      acc[0] += g;
      acc[1] ^= (i * 12) / g * (j * 18);
      acc[2] += (i << 3) ^ (j >> 1);
      acc[3] += (i | j) & ~(i & j);
    }
  return gcd(1071, 462) != 21;
}
