/* Recursive factorials summed. */
int results[13];

static int fac(int n) { return n <= 1 ? 1 : n * fac(n - 1); }

int main(void) {
  unsigned int s = 0;
  for (int round = 0; round < 20; round++)
    for (int i = 0; i <= 12; i++) {
      results[i] = fac(i);
      s += results[i];
    }
  /* 0!..12! sums to 522956314 */
  return s != 20u * 522956314u;
}
