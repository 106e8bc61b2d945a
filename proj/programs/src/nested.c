/* Nested loops whose inner bound depends on the outer variables. */
static int complex_kernel(int a, int b) {
  while (a < 30) {
    while (b < a) {
      if (b > 5) b = b * 3;
      else b = b + 2;
      if (b >= 10 && b <= 12) a = a + 10;
      else a = a + 1;
    }
    a = a + 2;
    b = b - 10;
  }
  return a + b;
}

int out[16];

int main(void) {
  int s = 0;
  for (int i = 0; i < 16; i++) {
    out[i] = complex_kernel(i, i / 2);
    s += out[i];
  }
  return s == 0;
}
