/* Sieve of Eratosthenes up to 2000, then trial-division cross-check. */
#define LIMIT 2000
unsigned char composite[LIMIT + 1];

static int is_prime(unsigned int n) {
  if (n < 2) return 0;
  for (unsigned int d = 2; d * d <= n; d++)
    if (n % d == 0) return 0;
  return 1;
}

int main(void) {
  for (int i = 2; i * i <= LIMIT; i++)
    if (!composite[i])
      for (int j = i * i; j <= LIMIT; j += i) composite[j] = 1;
  int count = 0;
  for (int i = 2; i <= LIMIT; i++) count += !composite[i];
  for (int i = 1900; i <= LIMIT; i++)
    if (is_prime(i) != (i >= 2 && !composite[i])) return 2;
  return count != 303;
}
