/* Signed and unsigned division identities, including the corner cases. */
int samples[24] = {0, 1, -1, 2, -2, 7, -7, 100, -100, 12345, -12345, 65536,
                   -65536, 0x7FFFFFFF, -0x7FFFFFFF - 1, 3, -3, 99, 1000003, -999, 46341, 17, -17, 5};
volatile int sink;

int main(void) {
  int bad = 0;
  for (int i = 0; i < 24; i++)
    for (int j = 0; j < 24; j++) {
      int a = samples[i], b = samples[j];
      if (b == 0) {
        bad |= (a / b) != -1 || (a % b) != a;
        continue;
      }
      if (a == -0x7FFFFFFF - 1 && b == -1) {
        sink = a / b;
        continue;
      }
      int q = a / b, r = a % b;
      bad |= q * b + r != a;
      unsigned int ua = (unsigned int)a, ub = (unsigned int)b;
      bad |= (ua / ub) * ub + ua % ub != ua;
      long long p = (long long)a * b;
      bad |= (int)(p >> 32) != (int)(((long long)a * (long long)b) >> 32);
    }
  return bad;
}
