/* Iterative and doubly recursive Fibonacci. */
int memo[25];

static int fib_rec(int n) { return n < 2 ? n : fib_rec(n - 1) + fib_rec(n - 2); }

static int fib_iter(int n) {
  int a = 0, b = 1;
  for (int i = 0; i < n; i++) {
    int t = a + b;
    a = b;
    b = t;
  }
  return a;
}

int main(void) {
  for (int i = 0; i < 25; i++) memo[i] = fib_iter(i);
  return fib_rec(16) != memo[16] || memo[24] != 46368;
}
