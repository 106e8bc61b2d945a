/* 8x8 integer matrix product, checked against the trace identity. */
#define N 8
int a[N][N], b[N][N], c[N][N];

static void multiply(void) {
  for (int i = 0; i < N; i++)
    for (int j = 0; j < N; j++) {
      int s = 0;
      for (int k = 0; k < N; k++) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
}

int main(void) {
  for (int i = 0; i < N; i++)
    for (int j = 0; j < N; j++) {
      a[i][j] = i * 3 + j - 7;
      b[i][j] = (i ^ j) + 2 * i - j;
    }
  multiply();
  /* sum of all entries of AB equals (column sums of A) . (row sums of B) */
  int total = 0, check = 0;
  for (int i = 0; i < N; i++)
    for (int j = 0; j < N; j++) total += c[i][j];
  for (int k = 0; k < N; k++) {
    int ca = 0, rb = 0;
    for (int i = 0; i < N; i++) ca += a[i][k];
    for (int j = 0; j < N; j++) rb += b[k][j];
    check += ca * rb;
  }
  return total != check;
}
