namespace GeomKernel.Drawing
{
    public class Renderer
    {
        private int frames;

        public void Render(object target)
        {
            frames++;
            Flush();
        }

        private void Flush() { }
    }
}
