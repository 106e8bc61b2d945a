/* Insertion sort of halfword keys. */
#define N 80
short keys[N];

int main(void) {
  unsigned int x = 7;
  for (int i = 0; i < N; i++) {
    x = x * 1664525u + 1013904223u;
    keys[i] = (short)(x >> 17);
  }
  for (int i = 1; i < N; i++) {
    short k = keys[i];
    int j = i - 1;
    while (j >= 0 && keys[j] > k) {
      keys[j + 1] = keys[j];
      j--;
    }
    keys[j + 1] = k;
  }
  for (int i = 1; i < N; i++)
    if (keys[i - 1] > keys[i]) return 1;
  return 0;
}
